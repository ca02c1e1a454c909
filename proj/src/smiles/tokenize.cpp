//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <utility>

#include "bracket.hpp"
#include "opforge/error.hpp"
#include "opforge/smiles.hpp"

namespace opforge::smiles {
namespace {

bool is_bond_char(char c) {
  switch (c) {
  case '-':
  case '=':
  case '#':
  case ':':
  case '/':
  case '\\':
  case '.':
    return true;
  default:
    return false;
  }
}

bool is_organic_char(char c) {
  switch (c) {
  case 'B':
  case 'C':
  case 'N':
  case 'O':
  case 'P':
  case 'S':
  case 'F':
  case 'I':
    return true;
  default:
    return false;
  }
}

bool is_aromatic_char(char c) {
  switch (c) {
  case 'b':
  case 'c':
  case 'n':
  case 'o':
  case 'p':
  case 's':
    return true;
  default:
    return false;
  }
}

bool is_digit(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

[[noreturn]] void unknown(std::string_view text, std::size_t pos) {
  throw Error(ErrorCode::kUnknownCharacter,
              "unexpected '" + std::string(1, text[pos]) + "' at offset "
                  + std::to_string(pos),
              pos);
}

}  // namespace

std::vector<Token> tokenize(std::string_view smiles) {
  std::vector<Token> tokens;
  tokens.reserve(smiles.size());

  std::size_t i = 0;
  while (i < smiles.size()) {
    const char c = smiles[i];
    if (c == 'C' && i + 1 < smiles.size() && smiles[i + 1] == 'l') {
      tokens.push_back({"Cl", TokenKind::kAtom});
      i += 2;
    } else if (c == 'B' && i + 1 < smiles.size() && smiles[i + 1] == 'r') {
      tokens.push_back({"Br", TokenKind::kAtom});
      i += 2;
    } else if (is_organic_char(c)) {
      tokens.push_back({std::string(1, c), TokenKind::kAtom});
      ++i;
    } else if (is_aromatic_char(c)) {
      tokens.push_back({std::string(1, c), TokenKind::kAromaticAtom});
      ++i;
    } else if (c == '[') {
      std::size_t j = i + 1;
      while (j < smiles.size() && smiles[j] != ']' && smiles[j] != '[') ++j;
      if (j >= smiles.size() || smiles[j] != ']') {
        throw Error(ErrorCode::kUnterminatedBracket,
                    "bracket opened at offset " + std::to_string(i)
                        + " is never closed",
                    i);
      }
      tokens.push_back(
          {std::string(smiles.substr(i, j - i + 1)), TokenKind::kBracketAtom});
      i = j + 1;
    } else if (is_bond_char(c)) {
      tokens.push_back({std::string(1, c), TokenKind::kBond});
      ++i;
    } else if (c == '(') {
      tokens.push_back({"(", TokenKind::kBranchOpen});
      ++i;
    } else if (c == ')') {
      tokens.push_back({")", TokenKind::kBranchClose});
      ++i;
    } else if (c >= '1' && c <= '9') {
      tokens.push_back({std::string(1, c), TokenKind::kRingBond});
      ++i;
    } else if (c == '%') {
      if (i + 2 >= smiles.size() || !is_digit(smiles[i + 1])
          || !is_digit(smiles[i + 2])) {
        unknown(smiles, i);
      }
      tokens.push_back(
          {std::string(smiles.substr(i, 3)), TokenKind::kRingBond});
      i += 3;
    } else {
      unknown(smiles, i);
    }
  }
  return tokens;
}

std::string detokenize(std::span<const Token> tokens) {
  std::string out;
  for (const Token &t : tokens) {
    if (t.kind == TokenKind::kSpecial) {
      throw Error(ErrorCode::kSpecialTokenPresent,
                  "special token " + t.text + " cannot be detokenized");
    }
    out += t.text;
  }
  return out;
}

Token make_token(std::string_view text) {
  if (text == kPadText || text == kBosText || text == kEosText)
    return {std::string(text), TokenKind::kSpecial};
  std::vector<Token> parts = tokenize(text);
  if (parts.size() != 1) {
    throw Error(ErrorCode::kUnknownToken,
                "'" + std::string(text) + "' is not a single token");
  }
  return std::move(parts.front());
}

std::optional<std::string> token_element(const Token &token) {
  switch (token.kind) {
  case TokenKind::kAtom:
    return token.text;
  case TokenKind::kAromaticAtom: {
    std::string s = token.text;
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
  }
  case TokenKind::kBracketAtom:
    try {
      return internal::parse_bracket_atom(token.text, 0).element;
    } catch (const Error &) {
      return std::nullopt;
    }
  default:
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary() {
  texts_ = {std::string(kPadText), std::string(kBosText),
            std::string(kEosText)};
  for (int i = 0; i < 3; ++i) index_.emplace(texts_[i], i);
}

Vocabulary Vocabulary::build(std::span<const std::vector<Token>> corpus) {
  if (corpus.empty())
    throw Error(ErrorCode::kEmptyCorpus, "cannot build a vocabulary from nothing");

  std::set<std::string, std::less<>> distinct;
  for (const auto &seq : corpus)
    for (const Token &t : seq)
      if (t.kind != TokenKind::kSpecial) distinct.insert(t.text);

  Vocabulary vocab;
  for (const std::string &text : distinct) {
    vocab.index_.emplace(text, static_cast<int>(vocab.texts_.size()));
    vocab.texts_.push_back(text);
  }
  return vocab;
}

Vocabulary Vocabulary::from_texts(std::vector<std::string> texts) {
  if (texts.size() < 3 || texts[kPad] != kPadText || texts[kBos] != kBosText
      || texts[kEos] != kEosText) {
    throw Error(ErrorCode::kInvalidArgument,
                "vocabulary must start with <PAD>, <BOS>, <EOS>");
  }
  Vocabulary vocab;
  vocab.texts_.clear();
  vocab.index_.clear();
  for (std::string &text : texts) {
    const int id = static_cast<int>(vocab.texts_.size());
    if (!vocab.index_.emplace(text, id).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate vocabulary entry '" + text + "'");
    }
    vocab.texts_.push_back(std::move(text));
  }
  return vocab;
}

std::optional<int> Vocabulary::find(std::string_view text) const {
  auto it = index_.find(text);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string &Vocabulary::text(int id) const {
  if (id < 0 || id >= size()) {
    throw Error(ErrorCode::kIdOutOfRange,
                "token id " + std::to_string(id) + " outside vocabulary of "
                    + std::to_string(size()));
  }
  return texts_[id];
}

std::vector<int> Vocabulary::encode(std::span<const Token> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const Token &t : tokens) {
    auto id = find(t.text);
    if (!id) {
      throw Error(ErrorCode::kUnknownToken,
                  "token '" + t.text + "' is not in the vocabulary");
    }
    ids.push_back(*id);
  }
  return ids;
}

std::vector<Token> Vocabulary::decode(std::span<const int> ids) const {
  std::vector<Token> tokens;
  tokens.reserve(ids.size());
  for (int id : ids) tokens.push_back(make_token(text(id)));
  return tokens;
}

}  // namespace opforge::smiles
