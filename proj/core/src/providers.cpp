#include "pickdrop/providers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "pickdrop/detector_labels.hpp"
#include "pickdrop/errors.hpp"
#include "pickdrop/rng.hpp"

namespace pickdrop {

namespace {

// Gaussian samples via Box-Muller on SplitMix64 bits; fully deterministic.
void fill_gaussian(SplitMix64& rng, std::vector<double>& out) {
  for (std::size_t i = 0; i < out.size(); i += 2) {
    double u1 = rng.uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = rng.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    out[i] = radius * std::cos(angle);
    if (i + 1 < out.size()) out[i + 1] = radius * std::sin(angle);
  }
}

std::string lowercased(std::string_view word) {
  std::string out(word);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> words;
  std::string current;
  for (const char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

}  // namespace

SyntheticVocabulary::SyntheticVocabulary(int dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
  if (dim < 1) {
    throw InvalidArgumentError("SyntheticVocabulary: dim must be >= 1");
  }
  build_table();
}

std::vector<double> SyntheticVocabulary::hashed_unit_vector(
    const std::string& word) const {
  SplitMix64 rng(fnv1a64(word) ^ (seed_ * 0x9e3779b97f4a7c15ULL));
  std::vector<double> values(dim_);
  fill_gaussian(rng, values);
  double norm2 = 0.0;
  for (const double v : values) norm2 += v * v;
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : values) v *= inv;
  return values;
}

void SyntheticVocabulary::build_table() {
  for (const std::string& label : default_detector_queries()) {
    for (std::string& word : tokenize(label)) {
      if (std::find(table_words_.begin(), table_words_.end(), word) ==
          table_words_.end()) {
        table_words_.push_back(std::move(word));
      }
    }
  }
  for (const char* extra : {"floor", "wall"}) {
    if (std::find(table_words_.begin(), table_words_.end(), extra) ==
        table_words_.end()) {
      table_words_.emplace_back(extra);
    }
  }

  const std::size_t n = table_words_.size();
  std::vector<std::vector<double>> vecs(n);
  for (std::size_t i = 0; i < n; ++i) {
    vecs[i] = hashed_unit_vector(table_words_[i]);
  }

  // Pairwise repulsion until near-orthogonal. Independent random unit
  // vectors in this dimension stray up to |dot| ~ 0.5 over this many pairs;
  // a few sweeps push every pair below the cap.
  const double cap = 0.25;
  const auto dot = [&](std::size_t a, std::size_t b) {
    double d = 0.0;
    for (int k = 0; k < dim_; ++k) d += vecs[a][k] * vecs[b][k];
    return d;
  };
  const auto renormalize = [&](std::size_t a) {
    double n2 = 0.0;
    for (const double v : vecs[a]) n2 += v * v;
    const double inv = 1.0 / std::sqrt(n2);
    for (double& v : vecs[a]) v *= inv;
  };
  for (int sweep = 0; sweep < 200; ++sweep) {
    bool dirty = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = dot(i, j);
        if (std::abs(d) <= cap) continue;
        dirty = true;
        const double excess = d - std::copysign(cap, d);
        const std::vector<double> old_i = vecs[i];
        for (int k = 0; k < dim_; ++k) {
          vecs[i][k] -= 0.6 * excess * vecs[j][k];
          vecs[j][k] -= 0.6 * excess * old_i[k];
        }
        renormalize(i);
        renormalize(j);
      }
    }
    if (!dirty) break;
  }

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<float> out(dim_);
    for (int k = 0; k < dim_; ++k) out[k] = static_cast<float>(vecs[i][k]);
    table_[table_words_[i]] = std::move(out);
  }
}

std::vector<float> SyntheticVocabulary::word_vector(
    const std::string& word) const {
  const std::string key = lowercased(word);
  if (const auto it = table_.find(key); it != table_.end()) {
    return it->second;
  }
  const std::vector<double> values = hashed_unit_vector(key);
  std::vector<float> out(dim_);
  for (int i = 0; i < dim_; ++i) out[i] = static_cast<float>(values[i]);
  return out;
}

std::vector<float> SyntheticVocabulary::embed_text(
    const std::string& text) const {
  const std::vector<std::string> words = tokenize(text);
  if (words.empty()) {
    throw InvalidArgumentError("embed_text: no words in \"" + text + "\"");
  }
  std::vector<double> sum(dim_, 0.0);
  for (const std::string& word : words) {
    const std::vector<float> wv = word_vector(word);
    for (int i = 0; i < dim_; ++i) sum[i] += double(wv[i]);
  }
  double norm2 = 0.0;
  for (const double v : sum) norm2 += v * v;
  if (norm2 < 1e-18) {
    throw Error("embed_text: degenerate phrase embedding");
  }
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<float> out(dim_);
  for (int i = 0; i < dim_; ++i) out[i] = static_cast<float>(sum[i] * inv);
  return out;
}

PrecomputedEmbeddings PrecomputedEmbeddings::from_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("PrecomputedEmbeddings: cannot open " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("PrecomputedEmbeddings: bad JSON: ") +
                     e.what());
  }
  PrecomputedEmbeddings table(j.at("dim"));
  for (const auto& [text, values] : j.at("entries").items()) {
    table.add(text, values.get<std::vector<float>>());
  }
  return table;
}

void PrecomputedEmbeddings::add(const std::string& text,
                                std::vector<float> embedding) {
  if (static_cast<int>(embedding.size()) != dim_) {
    throw InvalidArgumentError(
        "PrecomputedEmbeddings: embedding dimension mismatch for \"" + text +
        "\"");
  }
  double n2 = 0.0;
  for (const float v : embedding) n2 += double(v) * double(v);
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-4) {
    throw InvalidArgumentError(
        "PrecomputedEmbeddings: embedding for \"" + text +
        "\" is not unit norm");
  }
  entries_[text] = std::move(embedding);
}

void PrecomputedEmbeddings::save(const std::filesystem::path& path) const {
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [text, values] : entries_) entries[text] = values;
  nlohmann::json j{{"dim", dim_}, {"entries", std::move(entries)}};
  std::ofstream out(path);
  if (!out) {
    throw ParseError("PrecomputedEmbeddings: cannot open " + path.string());
  }
  out << j.dump(2) << '\n';
}

std::vector<float> PrecomputedEmbeddings::embed_text(
    const std::string& text) const {
  const auto it = entries_.find(text);
  if (it == entries_.end()) {
    throw InvalidArgumentError("PrecomputedEmbeddings: no embedding for \"" +
                               text + "\"");
  }
  return it->second;
}

}  // namespace pickdrop
