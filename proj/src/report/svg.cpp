//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "opforge/error.hpp"
#include "opforge/report.hpp"

namespace opforge::report {
namespace {

namespace fs = std::filesystem;

struct FieldInfo {
  Field field;
  std::string_view name;
  std::string_view label;
};

constexpr std::array<FieldInfo, 10> kFields = {{
    {Field::kMw, "mw", "MW (g/mol)"},
    {Field::kAlogp, "alogp", "ALOGP (log units)"},
    {Field::kHba, "hba", "HBA (count)"},
    {Field::kHbd, "hbd", "HBD (count)"},
    {Field::kPsa, "psa", "PSA (\xC3\x85\xC2\xB2)"},
    {Field::kRotb, "rotb", "ROTB (count)"},
    {Field::kArom, "arom", "AROM (count)"},
    {Field::kAlerts, "alerts", "ALERTS (count)"},
    {Field::kQed, "qed", "QED (unitless)"},
    {Field::kLength, "length", "Length (tokens)"},
}};

const FieldInfo &info(Field f) {
  return *std::find_if(kFields.begin(), kFields.end(),
                       [f](const FieldInfo &i) { return i.field == f; });
}

// Canvas and plot area in px.
constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 80, kRight = 20, kTop = 20, kBottom = 60;
constexpr int kTicks = 5;

struct Axis {
  double lo, hi;
  double at(double v, double from, double to) const {
    return from + (v - lo) / (hi - lo) * (to - from);
  }
};

Axis axis_for(double lo, double hi) {
  double span = hi - lo;
  if (span <= 0.0) span = std::max(std::fabs(lo), 1.0);
  return {lo - 0.05 * span, hi + 0.05 * span};
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Fixed precision keeps the bytes stable; -0.00 is folded into 0.00.
std::string px(double v) {
  std::string s = fmt::format("{:.2f}", v);
  return s == "-0.00" ? "0.00" : s;
}

std::string tick_label(double v) {
  std::string s = fmt::format("{:.3g}", v);
  return s == "-0" ? "0" : s;
}

}  // namespace

Field parse_field(std::string_view name) {
  for (const FieldInfo &i : kFields)
    if (i.name == name) return i.field;
  throw Error(ErrorCode::kInvalidArgument, "unknown field '" + std::string(name) + "'");
}

std::string_view field_name(Field field) { return info(field).name; }
std::string_view field_label(Field field) { return info(field).label; }

std::optional<double> field_value(const pipeline::GenerationRecord &r, Field field) {
  switch (field) {
    case Field::kQed: return r.qed;
    case Field::kLength: return static_cast<double>(r.length);
    default: break;
  }
  if (!r.descriptors) return std::nullopt;
  const properties::DescriptorVector &d = *r.descriptors;
  switch (field) {
    case Field::kMw: return d.mw;
    case Field::kAlogp: return d.alogp;
    case Field::kHba: return d.hba;
    case Field::kHbd: return d.hbd;
    case Field::kPsa: return d.psa;
    case Field::kRotb: return d.rotb;
    case Field::kArom: return d.arom;
    case Field::kAlerts: return d.alerts;
    default: return std::nullopt;
  }
}

std::string render_scatter(std::span<const pipeline::GenerationRecord> records, Field x,
                           Field y) {
  std::vector<std::pair<double, double>> points;
  for (const pipeline::GenerationRecord &r : records) {
    const auto vx = field_value(r, x), vy = field_value(r, y);
    if (vx && vy && std::isfinite(*vx) && std::isfinite(*vy)) points.emplace_back(*vx, *vy);
  }
  if (points.empty())
    throw Error(ErrorCode::kNoPlottableData,
                fmt::format("no record has both {} and {}", field_name(x), field_name(y)));

  double x0 = points[0].first, x1 = x0, y0 = points[0].second, y1 = y0;
  for (const auto &[a, b] : points) {
    x0 = std::min(x0, a);
    x1 = std::max(x1, a);
    y0 = std::min(y0, b);
    y1 = std::max(y1, b);
  }
  const Axis ax = axis_for(x0, x1), ay = axis_for(y0, y1);
  const double left = kLeft, right = kWidth - kRight, top = kTop, bottom = kHeight - kBottom;

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\">\n",
      kWidth, kHeight, kWidth, kHeight);
  svg += fmt::format("<title>{} vs {}</title>\n", xml_escape(field_label(y)),
                     xml_escape(field_label(x)));
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
                     kWidth, kHeight);
  svg += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      px(left), px(top), px(right - left), px(bottom - top));

  svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (int k = 0; k < kTicks; ++k) {
    const double t = static_cast<double>(k) / (kTicks - 1);
    const double vx = ax.lo + t * (ax.hi - ax.lo), vy = ay.lo + t * (ay.hi - ay.lo);
    const double cx = ax.at(vx, left, right), cy = ay.at(vy, bottom, top);
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
                       px(cx), px(bottom), px(bottom + 5));
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px(cx),
                       px(bottom + 18), tick_label(vx));
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n",
                       px(left - 5), px(cy), px(left));
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
                       px(left - 8), px(cy + 4), tick_label(vy));
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
                     px((left + right) / 2), px(kHeight - 15), xml_escape(field_label(x)));
  svg += fmt::format(
      "<text x=\"{0}\" y=\"{1}\" text-anchor=\"middle\" font-size=\"13\" "
      "transform=\"rotate(-90 {0} {1})\">{2}</text>\n",
      px(20), px((top + bottom) / 2), xml_escape(field_label(y)));
  svg += "</g>\n";

  svg += "<g fill=\"#1f77b4\" fill-opacity=\"0.6\" stroke=\"none\">\n";
  for (const auto &[a, b] : points)
    svg += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3\"/>\n", px(ax.at(a, left, right)),
                       px(ay.at(b, bottom, top)));
  svg += "</g>\n</svg>\n";
  return svg;
}

void emit_scatter(std::span<const pipeline::GenerationRecord> records, Field x, Field y,
                  const fs::path &path) {
  const std::string svg = render_scatter(records, x, y);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << svg;
  out.flush();
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

}  // namespace opforge::report
