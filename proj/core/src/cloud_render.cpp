#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "lids/error.hpp"
#include "lids/layer_inference.hpp"
#include "lids/number_format.hpp"

namespace lids {
namespace {

constexpr double kWidth = 800.0;
constexpr double kPanelHeight = 400.0;
constexpr double kTitleBand = 36.0;
constexpr double kMargin = 12.0;
constexpr double kMaxFont = 44.0;
constexpr double kMinFont = 12.0;
constexpr std::size_t kMaxWordsPerPanel = 120;

struct Box {
  double x0, y0, x1, y1;

  bool overlaps(const Box& o) const { return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1; }
};

std::size_t codepoints(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

// Darker for the leading words of a panel.
std::string shade(std::size_t rank, std::size_t count) {
  const double t = count > 1 ? static_cast<double>(rank) / static_cast<double>(count - 1) : 0.0;
  const int level = static_cast<int>(std::lround(30.0 + 120.0 * t));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", level / 3, level / 2, std::min(255, level + 60));
  return buf;
}

void render_panel(std::string& svg, const LayerKeywordSet& set, double top) {
  svg += "  <g class=\"layer\" data-layer=\"" + std::to_string(set.layer) + "\" transform=\"translate(0," +
         fixed1(top) + ")\">\n";
  svg += "    <rect x=\"0.5\" y=\"0.5\" width=\"" + fixed1(kWidth - 1.0) + "\" height=\"" +
         fixed1(kPanelHeight - 1.0) + "\" fill=\"#ffffff\" stroke=\"#999999\"/>\n";
  svg += "    <text x=\"" + fixed1(kMargin) + "\" y=\"24.0\" font-size=\"16\" fill=\"#333333\">Layer " +
         std::to_string(set.layer) + " (singular value " + format_significant(set.singular_value, 6) +
         ", q = " + format_significant(set.q, 6) + ")</text>\n";

  std::vector<const WordEntry*> words;
  for (const auto& e : set.entries) {
    if (e.selected) words.push_back(&e);
  }
  std::stable_sort(words.begin(), words.end(), [](const WordEntry* a, const WordEntry* b) { return a->stat > b->stat; });
  if (words.size() > kMaxWordsPerPanel) words.resize(kMaxWordsPerPanel);

  if (words.empty()) {
    svg += "    <text x=\"" + fixed1(kWidth / 2) + "\" y=\"" + fixed1(kPanelHeight / 2) +
           "\" font-size=\"18\" text-anchor=\"middle\" fill=\"#888888\">no words selected</text>\n";
    svg += "  </g>\n";
    return;
  }

  const Box area{kMargin, kTitleBand, kWidth - kMargin, kPanelHeight - kMargin};
  const double cx = kWidth / 2.0;
  const double cy = (area.y0 + area.y1) / 2.0;
  std::vector<Box> placed;
  for (std::size_t rank = 0; rank < words.size(); ++rank) {
    const auto& w = *words[rank];
    const double t = words.size() > 1 ? static_cast<double>(rank) / static_cast<double>(words.size() - 1) : 0.0;
    const double size = kMaxFont - (kMaxFont - kMinFont) * t;
    const double width = 0.6 * size * static_cast<double>(codepoints(w.word));
    const double height = size;

    // Archimedean spiral outward from the panel centre.
    for (double theta = 0.0; theta < 400.0; theta += 0.1) {
      const double r = 2.0 * theta;
      const double x = cx + r * std::cos(theta) * 1.6;
      const double y = cy + r * std::sin(theta);
      const Box box{x - width / 2.0, y - height / 2.0, x + width / 2.0, y + height / 2.0};
      if (box.x0 < area.x0 || box.x1 > area.x1 || box.y0 < area.y0 || box.y1 > area.y1) continue;
      if (std::any_of(placed.begin(), placed.end(), [&](const Box& b) { return b.overlaps(box); })) continue;
      placed.push_back(box);
      svg += "    <text x=\"" + fixed1(x) + "\" y=\"" + fixed1(box.y1 - 0.2 * height) + "\" font-size=\"" +
             fixed1(size) + "\" text-anchor=\"middle\" fill=\"" + shade(rank, words.size()) + "\" data-stat=\"" +
             format_significant(w.stat, 6) + "\">" + xml_escape(w.word) + "</text>\n";
      break;
    }
  }
  svg += "  </g>\n";
}

}  // namespace

std::string emit_cloud_json(const KeywordClouds& clouds) {
  nlohmann::json doc;
  auto& layers = doc["layers"] = nlohmann::json::array();
  for (const auto& set : clouds.layers) {
    nlohmann::json words = nlohmann::json::array();
    for (const auto& e : set.entries) {
      words.push_back({{"word", e.word},
                       {"stat", round_significant(e.stat)},
                       {"pvalue", round_significant(e.pvalue)},
                       {"selected", e.selected}});
    }
    layers.push_back({{"layer", set.layer},
                      {"singular_value", round_significant(set.singular_value)},
                      {"q", round_significant(set.q)},
                      {"words", std::move(words)}});
  }
  doc["method"] = clouds.method;
  doc["sigma_hat"] = round_significant(clouds.sigma_hat);
  doc["noise_rank"] = clouds.noise_rank;
  return doc.dump(2) + "\n";
}

std::string emit_cloud_svg(const KeywordClouds& clouds) {
  const double height = kPanelHeight * static_cast<double>(std::max<std::size_t>(1, clouds.layers.size()));
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed1(kWidth) + "\" height=\"" + fixed1(height) +
         "\" viewBox=\"0 0 " + fixed1(kWidth) + " " + fixed1(height) +
         "\" font-family=\"Helvetica, Arial, sans-serif\">\n";
  svg += "  <desc>keyword clouds, " + std::string(clouds.method) + ", sigma_hat " +
         format_significant(clouds.sigma_hat, 6) + "</desc>\n";
  for (std::size_t i = 0; i < clouds.layers.size(); ++i) {
    render_panel(svg, clouds.layers[i], kPanelHeight * static_cast<double>(i));
  }
  svg += "</svg>\n";
  return svg;
}

std::string emit_cloud(const KeywordClouds& clouds, CloudFormat format) {
  if (clouds.layers.empty()) throw Error(ErrorCode::kEmptyInput, "no layers to render");
  return format == CloudFormat::kJson ? emit_cloud_json(clouds) : emit_cloud_svg(clouds);
}

}  // namespace lids
