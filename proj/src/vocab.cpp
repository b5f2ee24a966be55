#include "sopg/vocab.hpp"

#include <stdexcept>

#include "sopg/error.hpp"

namespace sopg {

std::string_view symbol_name(TokenId id) {
  return Vocabulary::instance().symbol(id);
}

Vocabulary::Vocabulary() {
  for (int i = 0; i < kPrintableCount; ++i) symbols_[i] = std::string(1, static_cast<char>(i + 0x20));
  symbols_[kStart] = "<S>";
  symbols_[kEnd] = "</S>";
  symbols_[kUnk] = "<unk>";
  symbols_[kBlank] = "<blank>";
}

const Vocabulary& Vocabulary::instance() {
  static const Vocabulary vocab;
  return vocab;
}

TokenId Vocabulary::id(std::string_view symbol) const {
  if (symbol.size() == 1 && is_printable(static_cast<unsigned char>(symbol[0])))
    return encode_char(symbol[0]);
  for (int i = kPrintableCount; i < kVocabSize; ++i)
    if (symbols_[i] == symbol) return static_cast<TokenId>(i);
  throw std::out_of_range("unknown symbol: " + std::string(symbol));
}

namespace {

void check_length(std::string_view password, std::size_t n) {
  if (password.size() >= n)
    throw LengthOverflowError("password of length " + std::to_string(password.size()) +
                              " does not fit sequence length " + std::to_string(n));
}

}  // namespace

std::vector<TokenId> encode_input(std::string_view password, std::size_t n) {
  check_length(password, n);
  std::vector<TokenId> out(n, kBlank);
  out[0] = kStart;
  for (std::size_t i = 0; i < password.size(); ++i) out[i + 1] = encode_char(password[i]);
  return out;
}

std::vector<TokenId> encode_target(std::string_view password, std::size_t n) {
  check_length(password, n);
  std::vector<TokenId> out(n, kBlank);
  for (std::size_t i = 0; i < password.size(); ++i) out[i] = encode_char(password[i]);
  out[password.size()] = kEnd;
  return out;
}

std::string decode_input(std::span<const TokenId> ids) {
  std::string out;
  for (TokenId id : ids) {
    if (id == kStart || id == kBlank) continue;
    if (id == kEnd) break;
    out.push_back(decode_char(id));
  }
  return out;
}

}  // namespace sopg
