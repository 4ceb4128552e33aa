#include "exp/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "common/errors.hpp"
#include "exp/csv.hpp"

namespace fs = std::filesystem;

namespace hmmvae::exp {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b"};
constexpr std::size_t kPaletteSize = 6;
constexpr std::size_t kMaxPoints = 600;  // cap for per-step trajectory plots

constexpr double kWidth = 860.0;
constexpr double kPanelHeight = 240.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 700.0;  // plot area ends here; legend sits to the right
constexpr double kTop = 34.0;
constexpr double kBottom = 26.0;

std::string short_num(double v, int precision = 4) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

std::string fixed3(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 3);
  return std::string(buf, res.ptr);
}

struct Series {
  std::string label;
  std::string color;
  std::vector<double> xs;
  std::vector<double> ys;
  bool step = false;  // draw as a staircase (for discrete state paths)
};

struct Panel {
  std::string title;
  std::vector<Series> series;
};

double parse_cell(const std::string& s) { return std::stod(s); }

// draws one chart panel into `out`, vertically offset by `y0`
void emit_panel(std::ostringstream& out, const Panel& panel, double y0) {
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool any = false;
  for (const auto& s : panel.series) {
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!any) {
        xmin = xmax = s.xs[i];
        ymin = ymax = s.ys[i];
        any = true;
      } else {
        xmin = std::min(xmin, s.xs[i]);
        xmax = std::max(xmax, s.xs[i]);
        ymin = std::min(ymin, s.ys[i]);
        ymax = std::max(ymax, s.ys[i]);
      }
    }
  }
  double xspan = xmax - xmin;
  double yspan = ymax - ymin;
  if (xspan <= 0.0) xspan = 1.0;
  if (yspan <= 0.0) yspan = 1.0;
  const double plot_w = kRight - kLeft;
  const double plot_h = kPanelHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / xspan * plot_w; };
  auto py = [&](double y) { return y0 + kTop + (1.0 - (y - ymin) / yspan) * plot_h; };

  out << "<g>\n";
  out << "<text x=\"" << fmt(kLeft) << "\" y=\"" << fmt(y0 + 20.0)
      << "\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#222\">" << panel.title
      << "</text>\n";
  out << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(y0 + kTop) << "\" width=\""
      << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
      << "\" fill=\"none\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  // axis extent labels
  out << "<text x=\"" << fmt(kLeft - 6.0) << "\" y=\"" << fmt(y0 + kTop + 10.0)
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555\" text-anchor=\"end\">"
      << short_num(ymax) << "</text>\n";
  out << "<text x=\"" << fmt(kLeft - 6.0) << "\" y=\"" << fmt(y0 + kTop + plot_h)
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555\" text-anchor=\"end\">"
      << short_num(ymin) << "</text>\n";
  out << "<text x=\"" << fmt(kLeft) << "\" y=\"" << fmt(y0 + kTop + plot_h + 16.0)
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555\">" << short_num(xmin)
      << "</text>\n";
  out << "<text x=\"" << fmt(kRight) << "\" y=\"" << fmt(y0 + kTop + plot_h + 16.0)
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555\" text-anchor=\"end\">"
      << short_num(xmax) << "</text>\n";

  std::size_t li = 0;
  for (const auto& s : panel.series) {
    if (!s.xs.empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (i > 0) {
          out << ' ';
          if (s.step) out << fmt(px(s.xs[i])) << ',' << fmt(py(s.ys[i - 1])) << ' ';
        }
        out << fmt(px(s.xs[i])) << ',' << fmt(py(s.ys[i]));
      }
      out << "\"/>\n";
    }
    const double ly = y0 + kTop + 14.0 + 18.0 * static_cast<double>(li);
    out << "<rect x=\"" << fmt(kRight + 14.0) << "\" y=\"" << fmt(ly - 9.0)
        << "\" width=\"12\" height=\"12\" fill=\"" << s.color << "\"/>\n";
    out << "<text x=\"" << fmt(kRight + 32.0) << "\" y=\"" << fmt(ly + 1.0)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">" << s.label
        << "</text>\n";
    ++li;
  }
  out << "</g>\n";
}

void write_svg(const std::string& path, const std::vector<Panel>& panels) {
  std::ostringstream out;
  const double height = kPanelHeight * static_cast<double>(panels.size());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth)
      << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(kWidth) << ' '
      << fmt(height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i)
    emit_panel(out, panels[i], kPanelHeight * static_cast<double>(i));
  out << "</svg>\n";
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << out.str();
}

std::string heat_color(double v) {
  v = std::min(1.0, std::max(0.0, v));
  // white -> steel blue
  const int r = static_cast<int>(std::lround(255.0 + (31.0 - 255.0) * v));
  const int g = static_cast<int>(std::lround(255.0 + (119.0 - 255.0) * v));
  const int b = static_cast<int>(std::lround(255.0 + (180.0 - 255.0) * v));
  static const char* hex = "0123456789abcdef";
  std::string s = "#......";
  s[1] = hex[(r >> 4) & 0xF];
  s[2] = hex[r & 0xF];
  s[3] = hex[(g >> 4) & 0xF];
  s[4] = hex[g & 0xF];
  s[5] = hex[(b >> 4) & 0xF];
  s[6] = hex[b & 0xF];
  return s;
}

void render_loss(const std::string& dir) {
  const Csv csv = read_csv(dir + "/loss.csv");
  const std::size_t epoch_col = csv.column("epoch");
  std::vector<double> epochs;
  for (const auto& row : csv.rows) epochs.push_back(parse_cell(row[epoch_col]));

  Panel losses;
  losses.title = "training loss components";
  const char* names[] = {"total", "rec", "logq", "logp"};
  for (std::size_t i = 0; i < 4; ++i) {
    Series s;
    s.label = names[i];
    s.color = kPalette[i % kPaletteSize];
    s.xs = epochs;
    const std::size_t c = csv.column(names[i]);
    for (const auto& row : csv.rows) s.ys.push_back(parse_cell(row[c]));
    losses.series.push_back(std::move(s));
  }

  Panel corr;
  corr.title = "matched source correlation (absolute)";
  for (std::size_t c = 0; c < csv.header.size(); ++c) {
    const std::string& name = csv.header[c];
    if (name.rfind("abs_corr_src", 0) != 0) continue;
    Series s;
    s.label = name.substr(std::string("abs_corr_").size());
    s.color = kPalette[corr.series.size() % kPaletteSize];
    s.xs = epochs;
    for (const auto& row : csv.rows) s.ys.push_back(parse_cell(row[c]));
    corr.series.push_back(std::move(s));
  }

  write_svg(dir + "/loss.svg", {losses, corr});
}

// shared by sources.svg (est_) and states.svg (decoded_): one panel per
// source overlaying the true trajectory and the recovered one
void render_paired(const std::string& csv_path, const std::string& svg_path,
                   const std::string& recovered_prefix, const std::string& what, bool step) {
  const Csv csv = read_csv(csv_path);
  const std::size_t t_col = csv.column("t");
  const std::size_t rows = std::min(csv.rows.size(), kMaxPoints);
  std::vector<double> ts;
  for (std::size_t r = 0; r < rows; ++r) ts.push_back(parse_cell(csv.rows[r][t_col]));

  std::size_t n = 0;
  while (true) {
    const std::string name = "true_src" + std::to_string(n + 1);
    if (std::find(csv.header.begin(), csv.header.end(), name) == csv.header.end()) break;
    ++n;
  }

  std::vector<Panel> panels;
  for (std::size_t j = 0; j < n; ++j) {
    Panel p;
    p.title = "source " + std::to_string(j + 1) + ": true vs " + what;
    Series truth;
    truth.label = "true";
    truth.color = kPalette[0];
    truth.step = step;
    truth.xs = ts;
    const std::size_t tc = csv.column("true_src" + std::to_string(j + 1));
    for (std::size_t r = 0; r < rows; ++r) truth.ys.push_back(parse_cell(csv.rows[r][tc]));
    Series rec;
    rec.label = what;
    rec.color = kPalette[1];
    rec.step = step;
    rec.xs = ts;
    const std::size_t rc = csv.column(recovered_prefix + std::to_string(j + 1));
    for (std::size_t r = 0; r < rows; ++r) rec.ys.push_back(parse_cell(csv.rows[r][rc]));
    p.series = {std::move(truth), std::move(rec)};
    panels.push_back(std::move(p));
  }
  write_svg(svg_path, panels);
}

void render_transitions(const std::string& dir) {
  const Csv csv = read_csv(dir + "/transitions.csv");
  const std::size_t src_col = csv.column("source");
  const std::size_t kind_col = csv.column("kind");
  const std::size_t row_col = csv.column("row");
  const std::size_t K = csv.header.size() - 3;

  std::size_t n = 0;
  for (const auto& row : csv.rows)
    n = std::max(n, static_cast<std::size_t>(parse_cell(row[src_col])));

  auto value_at = [&](std::size_t source, const std::string& kind, std::size_t r,
                      std::size_t c) {
    for (const auto& row : csv.rows) {
      if (static_cast<std::size_t>(parse_cell(row[src_col])) == source &&
          row[kind_col] == kind &&
          static_cast<std::size_t>(parse_cell(row[row_col])) == r + 1)
        return parse_cell(row[3 + c]);
    }
    throw IoError("transitions.csv is missing a row");
  };

  const double cell = 46.0;
  const double grid_w = cell * static_cast<double>(K);
  const double block_h = grid_w + 64.0;
  const double width = 2.0 * grid_w + 200.0;
  const double height = block_h * static_cast<double>(n) + 10.0;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
      << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  const char* kinds[] = {"learned", "empirical"};
  for (std::size_t j = 0; j < n; ++j) {
    const double oy = block_h * static_cast<double>(j);
    for (std::size_t gi = 0; gi < 2; ++gi) {
      const double ox = 70.0 + static_cast<double>(gi) * (grid_w + 60.0);
      out << "<text x=\"" << fmt(ox) << "\" y=\"" << fmt(oy + 22.0)
          << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#222\">source "
          << j + 1 << " — " << kinds[gi] << "</text>\n";
      for (std::size_t r = 0; r < K; ++r) {
        for (std::size_t c = 0; c < K; ++c) {
          const double v = value_at(j + 1, kinds[gi], r, c);
          const double x = ox + cell * static_cast<double>(c);
          const double y = oy + 34.0 + cell * static_cast<double>(r);
          out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(cell)
              << "\" height=\"" << fmt(cell) << "\" fill=\"" << heat_color(v)
              << "\" stroke=\"#888\" stroke-width=\"0.5\"/>\n";
          out << "<text x=\"" << fmt(x + cell / 2.0) << "\" y=\"" << fmt(y + cell / 2.0 + 4.0)
              << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
              << (v >= 0.55 ? "#ffffff" : "#111111") << "\" text-anchor=\"middle\">"
              << fixed3(v) << "</text>\n";
        }
      }
    }
  }
  out << "</svg>\n";
  std::ofstream f(dir + "/transitions.svg");
  if (!f) throw IoError("cannot open " + dir + "/transitions.svg for writing");
  f << out.str();
}

}  // namespace

void render_plots(const std::string& dir) {
  if (fs::exists(dir + "/loss.csv")) render_loss(dir);
  if (fs::exists(dir + "/sources.csv"))
    render_paired(dir + "/sources.csv", dir + "/sources.svg", "est_src", "estimated", false);
  if (fs::exists(dir + "/states.csv"))
    render_paired(dir + "/states.csv", dir + "/states.svg", "decoded_src", "decoded", true);
  if (fs::exists(dir + "/transitions.csv")) render_transitions(dir);
}

}  // namespace hmmvae::exp
