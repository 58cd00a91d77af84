// Deterministic toy contextual encoder. Produces .lids files for test
// fixtures when no pretrained encoder is available: each token row mixes a
// hashed base vector, a shared offset, hashed neighbour-bigram vectors and a
// coarse token-class trigram.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lids/embedding_store.hpp"
#include "lids/error.hpp"

namespace {

struct Params {
  int dim = 128;
  double stopword_scale = 0.3;
  double common = 0.5;
  double bigram = 1.0;
  double tags = 0.5;
};

struct Piece {
  std::string text;
  char cls;  // S special, T stopword, C content, P punctuation
  bool continuation = false;
  std::uint32_t word = 0;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Eigen::VectorXd hashed_vector(const std::string& key, int dim) {
  std::mt19937_64 rng(fnv1a(key));
  auto uniform = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 2.0 * M_PI * uniform();
    v(i) = r * std::cos(t);
    if (i + 1 < dim) v(i + 1) = r * std::sin(t);
  }
  return v / std::sqrt(static_cast<double>(dim));
}

bool word_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c) || c == '_'; }

std::vector<Piece> tokenize(const std::string& text, const std::set<std::string>& stopwords) {
  std::vector<Piece> out{{"[CLS]", 'S', false, 0}};
  std::uint32_t word = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (!word_byte(c)) {
      out.push_back({std::string(1, static_cast<char>(c)), 'P', false, ++word});
      ++i;
      continue;
    }
    std::string w;
    while (i < text.size() && word_byte(static_cast<unsigned char>(text[i]))) {
      w += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
      ++i;
    }
    const char cls = stopwords.count(w) ? 'T' : 'C';
    ++word;
    if (w.size() > 8) {
      out.push_back({w.substr(0, 6), cls, false, word});
      out.push_back({"##" + w.substr(6), cls, true, word});
    } else {
      out.push_back({w, cls, false, word});
    }
  }
  out.push_back({"[SEP]", 'S', false, ++word});
  return out;
}

lids::EmbeddedText encode(const std::string& text, const std::set<std::string>& stopwords, const Params& prm,
                          const std::string& model_id) {
  const auto pieces = tokenize(text, stopwords);
  const auto n = static_cast<Eigen::Index>(pieces.size());
  const Eigen::VectorXd shared = hashed_vector("__common__", prm.dim);
  lids::FloatMatrix m(n, prm.dim);
  std::vector<lids::TokenRecord> tokens;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pc = pieces[static_cast<std::size_t>(i)];
    Eigen::VectorXd x = prm.common * shared + (pc.cls == 'T' ? prm.stopword_scale : 1.0) * hashed_vector(pc.text, prm.dim);
    for (const auto [offset, weight] : {std::pair{-2, 0.5}, {-1, 1.0}, {1, 1.0}, {2, 0.5}}) {
      const auto j = i + offset;
      if (j < 0 || j >= n) continue;
      x += prm.bigram * weight *
           hashed_vector("bg" + std::to_string(offset) + ":" + pc.text + "|" + pieces[static_cast<std::size_t>(j)].text,
                         prm.dim);
    }
    const char left = i > 0 ? pieces[static_cast<std::size_t>(i - 1)].cls : 'S';
    const char right = i + 1 < n ? pieces[static_cast<std::size_t>(i + 1)].cls : 'S';
    x += prm.tags * hashed_vector(std::string("tag:") + left + pc.cls + right, prm.dim);
    m.row(i) = x.cast<float>().transpose();

    std::uint8_t flags = 0;
    if (pc.cls == 'S') flags |= lids::token_flag::kSpecial;
    if (pc.cls == 'T') flags |= lids::token_flag::kStopword;
    if (pc.cls == 'P') flags |= lids::token_flag::kPunctuation;
    if (pc.continuation) flags |= lids::token_flag::kContinuation;
    tokens.push_back({pc.text, pc.word, flags});
  }
  return lids::EmbeddedText(model_id, std::move(tokens), std::move(m));
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw lids::Error(lids::ErrorCode::kMissingFile, path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (!line.empty()) out.insert(line);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic synthetic token embeddings (.lids) for plain-text files"};
  Params prm;
  std::string stopword_path = LIDS_DATA_DIR "/stopwords_en.txt";
  std::string out_dir = ".";
  std::string model_id = "synthetic-context-v1";
  std::vector<std::string> inputs;
  app.add_option("inputs", inputs, "text files")->required()->check(CLI::ExistingFile);
  app.add_option("--out-dir", out_dir, "directory for <stem>.lids outputs");
  app.add_option("--dim", prm.dim, "embedding dimension")->check(CLI::Range(2, 4096));
  app.add_option("--stopwords", stopword_path, "stop-word list");
  app.add_option("--model-id", model_id);
  CLI11_PARSE(app, argc, argv);

  try {
    const auto stopwords = load_stopwords(stopword_path);
    std::filesystem::create_directories(out_dir);
    for (const auto& path : inputs) {
      std::ifstream in(path);
      std::stringstream buf;
      buf << in.rdbuf();
      const auto text = encode(buf.str(), stopwords, prm, model_id);
      const auto target = std::filesystem::path(out_dir) / (std::filesystem::path(path).stem().string() + ".lids");
      lids::save_embedded_text_file(text, target);
      std::cout << target.string() << " n=" << text.rows() << " p=" << text.dim() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
