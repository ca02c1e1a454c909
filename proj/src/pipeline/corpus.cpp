//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "opforge/csv.hpp"
#include "opforge/error.hpp"
#include "opforge/pipeline.hpp"

namespace opforge::pipeline {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<double> parse_qed(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !(v > 0.0 && v <= 1.0))
    return std::nullopt;
  return v;
}

std::ifstream open(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  return in;
}

void load_smi(std::istream &in, LoadedCorpus &out) {
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto split = std::find_if(text.begin(), text.end(), is_space);
    const std::string_view smiles = text.substr(0, split - text.begin());
    const std::string_view name = trim(text.substr(split - text.begin()));
    if (!smiles::is_valid_smiles(smiles)) {
      ++out.skipped;
      continue;
    }
    CorpusRecord r;
    r.smiles = std::string(smiles);
    if (!name.empty()) r.id = std::string(name);
    out.records.push_back(std::move(r));
  }
}

void load_csv(std::istream &in, const std::filesystem::path &path, LoadedCorpus &out) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields))
    throw Error(ErrorCode::kUnknownFormat, path.string() + ": missing CSV header");
  if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
  int smiles_col = -1, qed_col = -1, id_col = -1;
  for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
    const std::string name = lower(trim(fields[i]));
    if (name == "smiles") smiles_col = i;
    if (name == "qed") qed_col = i;
    if (name == "id") id_col = i;
  }
  if (smiles_col < 0)
    throw Error(ErrorCode::kUnknownFormat, path.string() + ": no 'smiles' column");

  while (reader.next(fields)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    const auto cell = [&](int col) -> std::string_view {
      return col >= 0 && col < static_cast<int>(fields.size()) ? trim(fields[col])
                                                               : std::string_view();
    };
    const std::string_view smiles = cell(smiles_col);
    if (!reader.well_formed() || !smiles::is_valid_smiles(smiles)) {
      ++out.skipped;
      continue;
    }
    CorpusRecord r;
    r.smiles = std::string(smiles);
    if (!cell(id_col).empty()) r.id = std::string(cell(id_col));
    if (!cell(qed_col).empty()) {
      r.qed = parse_qed(cell(qed_col));
      if (!r.qed) {
        ++out.skipped;
        continue;
      }
    }
    out.records.push_back(std::move(r));
  }
}

}  // namespace

CorpusFormat parse_format(std::string_view name) {
  const std::string n = lower(name);
  if (n == "smi") return CorpusFormat::kSmi;
  if (n == "csv") return CorpusFormat::kCsv;
  throw Error(ErrorCode::kUnknownFormat, "unknown corpus format '" + std::string(name) + "'");
}

CorpusFormat format_for(const std::filesystem::path &path) {
  const std::string ext = path.extension().string();
  if (ext.size() < 2)
    throw Error(ErrorCode::kUnknownFormat, "no format extension on " + path.string());
  return parse_format(std::string_view(ext).substr(1));
}

LoadedCorpus load_corpus(const std::filesystem::path &path, CorpusFormat format) {
  std::ifstream in = open(path);
  LoadedCorpus out;
  if (format == CorpusFormat::kSmi)
    load_smi(in, out);
  else
    load_csv(in, path, out);
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "read error on " + path.string());
  return out;
}

LoadedCorpus load_corpus(const std::filesystem::path &path) {
  return load_corpus(path, format_for(path));
}

std::vector<CorpusRecord> screen_corpus(std::span<const CorpusRecord> records,
                                        const properties::PropertyTables &tables,
                                        double threshold) {
  std::vector<CorpusRecord> out;
  for (const CorpusRecord &r : records) {
    CorpusRecord kept = r;
    if (!kept.qed) {
      try {
        const auto scored = properties::score_smiles(r.smiles, tables);
        if (!scored) continue;
        kept.qed = scored->qed;
      } catch (const Error &) {
        continue;
      }
    }
    if (*kept.qed > threshold) out.push_back(std::move(kept));
  }
  return out;
}

std::vector<TrainingWindow> make_windows(std::span<const int> ids, int window_len) {
  if (window_len < 2)
    throw Error(ErrorCode::kInvalidArgument, "window length must be at least 2");
  std::vector<TrainingWindow> out;
  for (std::size_t t = 1; t < ids.size(); ++t) {
    TrainingWindow w;
    w.input.resize(window_len);
    for (int k = 0; k < window_len; ++k) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) - window_len + k;
      w.input[k] = src < 0 ? smiles::Vocabulary::kPad : ids[src];
    }
    w.target = ids[t];
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<int> encode_smiles(std::string_view text, const smiles::Vocabulary &vocab) {
  const std::vector<smiles::Token> tokens = smiles::tokenize(text);
  std::vector<int> ids;
  ids.reserve(tokens.size() + 2);
  ids.push_back(smiles::Vocabulary::kBos);
  for (int id : vocab.encode(tokens)) ids.push_back(id);
  ids.push_back(smiles::Vocabulary::kEos);
  return ids;
}

}  // namespace opforge::pipeline
