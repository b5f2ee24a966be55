#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sopg {

using TokenId = std::uint8_t;

// Fixed 99-symbol alphabet. Printable ASCII 0x20..0x7E occupies ids 0..94
// (id = codepoint - 0x20); the four special identifiers follow. This index
// order is part of the adapter wire protocol.
inline constexpr int kPrintableCount = 95;
inline constexpr int kVocabSize = 99;
inline constexpr TokenId kStart = 95;
inline constexpr TokenId kEnd = 96;
inline constexpr TokenId kUnk = 97;
inline constexpr TokenId kBlank = 98;

constexpr bool is_printable(unsigned char c) noexcept { return c >= 0x20 && c <= 0x7E; }

constexpr bool is_printable_id(int id) noexcept { return id >= 0 && id < kPrintableCount; }

// Maps any byte to its id; non-printable bytes become UNK.
constexpr TokenId encode_char(char c) noexcept {
  const auto u = static_cast<unsigned char>(c);
  return is_printable(u) ? static_cast<TokenId>(u - 0x20) : kUnk;
}

// Printable ids decode to their character. Special ids have no character and
// decode to '\0'; use symbol_name() for display.
constexpr char decode_char(TokenId id) noexcept {
  return is_printable_id(id) ? static_cast<char>(id + 0x20) : '\0';
}

std::string_view symbol_name(TokenId id);

class Vocabulary {
 public:
  Vocabulary();

  static const Vocabulary& instance();

  int size() const noexcept { return kVocabSize; }

  // Symbols as strings: one character for printables, "<S>", "</S>",
  // "<unk>", "<blank>" for the specials.
  const std::string& symbol(TokenId id) const { return symbols_.at(id); }

  // Inverse of symbol(); throws std::out_of_range for unknown names.
  TokenId id(std::string_view symbol) const;

 private:
  std::array<std::string, kVocabSize> symbols_;
};

// Model input X: START, the password's ids, then BLANK padding up to n.
std::vector<TokenId> encode_input(std::string_view password, std::size_t n);

// Target Y: the password's ids, END, then BLANK padding up to n. Equals
// encode_input shifted left by one with END in place of the first BLANK.
std::vector<TokenId> encode_target(std::string_view password, std::size_t n);

// Inverse of encode_input for the real characters: skips START/BLANK and
// stops at END. UNK decodes to '\0'.
std::string decode_input(std::span<const TokenId> ids);

}  // namespace sopg
