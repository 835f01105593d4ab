#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace pfc::harness {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Canvas {
  std::ostringstream body;
  double width, height;

  Canvas(double w, double h) : width(w), height(h) {}

  void line(double x1, double y1, double x2, double y2, const std::string& color,
            double stroke = 1.0) {
    body << "<line x1='" << num(x1) << "' y1='" << num(y1) << "' x2='" << num(x2)
         << "' y2='" << num(y2) << "' stroke='" << color << "' stroke-width='"
         << num(stroke) << "'/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke) {
    body << "<rect x='" << num(x) << "' y='" << num(y) << "' width='" << num(w)
         << "' height='" << num(h) << "' fill='" << fill << "' stroke='" << stroke
         << "'/>\n";
  }
  void text(double x, double y, const std::string& s, int size = 11,
            const std::string& anchor = "middle") {
    body << "<text x='" << num(x) << "' y='" << num(y) << "' font-size='" << size
         << "' font-family='sans-serif' text-anchor='" << anchor << "'>" << s
         << "</text>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                double stroke) {
    body << "<polyline fill='none' stroke='" << color << "' stroke-width='" << num(stroke)
         << "' points='";
    for (const auto& [x, y] : pts) body << num(x) << ',' << num(y) << ' ';
    body << "'/>\n";
  }
  std::string finish() const {
    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << num(width) << "' height='"
       << num(height) << "' viewBox='0 0 " << num(width) << ' ' << num(height) << "'>\n"
       << "<rect width='100%' height='100%' fill='white'/>\n"
       << body.str() << "</svg>\n";
    return os.str();
  }
};

}  // namespace

std::string box_plot_svg(const CsvTable& metric) {
  const int cl = metric.column("length");
  const int cm = metric.column("mu");
  const int cs = metric.column("slope_deg");
  const int cv = metric.column("v");
  if (cl < 0 || cm < 0 || cv < 0)
    throw ConfigError("box plot: csv must have length, mu and v columns");
  if (metric.rows.empty()) throw ConfigError("box plot: csv has no data rows");

  std::map<std::string, std::vector<double>> groups;
  for (const auto& row : metric.rows) {
    std::string key = "L=" + row[cl] + " mu=" + row[cm];
    if (cs >= 0 && row[cs] != "0") key += " s=" + row[cs];
    groups[key].push_back(std::stod(row[cv]));
  }

  const double box_w = 46.0, gap = 26.0, left = 60.0, top = 30.0, plot_h = 260.0;
  const double width = left + groups.size() * (box_w + gap) + 30.0;
  Canvas cv_(width, top + plot_h + 70.0);

  auto y_of = [&](double v) { return top + plot_h * (1.0 - v); };
  cv_.line(left - 10, y_of(0.0), width - 15, y_of(0.0), "black");
  cv_.line(left - 10, y_of(0.0), left - 10, y_of(1.0), "black");
  for (double tick = 0.0; tick <= 1.001; tick += 0.25) {
    cv_.line(left - 14, y_of(tick), left - 10, y_of(tick), "black");
    cv_.text(left - 18, y_of(tick) + 4, num(tick), 10, "end");
  }
  cv_.text(18, top + plot_h / 2, "v", 12);

  double x = left + gap / 2;
  for (auto& [name, vals] : groups) {
    Summary s = summarize(vals);
    const double cx = x + box_w / 2;
    cv_.line(cx, y_of(s.min), cx, y_of(s.q1), "black");
    cv_.line(cx, y_of(s.q3), cx, y_of(s.max), "black");
    cv_.line(cx - box_w / 4, y_of(s.min), cx + box_w / 4, y_of(s.min), "black");
    cv_.line(cx - box_w / 4, y_of(s.max), cx + box_w / 4, y_of(s.max), "black");
    cv_.rect(x, y_of(s.q3), box_w, y_of(s.q1) - y_of(s.q3), "#aed6f1", "black");
    cv_.line(x, y_of(s.median), x + box_w, y_of(s.median), "black", 2.0);
    cv_.text(cx, top + plot_h + 16, name, 9);
    x += box_w + gap;
  }
  return cv_.finish();
}

namespace {

struct Series {
  std::vector<double> u;  // normalized time
  std::vector<double> phi_deg;
  std::vector<double> contact_pos_cm;
};

// Normalized time: each target-mode phase maps onto a unit interval.
Series normalize_trajectory(const CsvTable& t) {
  const int ct = t.column("t");
  const int cphi = t.column("phi");
  const int cmode = t.column("target_mode");
  const int c0x = t.column("c0x");
  const int c0y = t.column("c0y");
  if (ct < 0 || cphi < 0)
    throw ConfigError("trajectory plot: csv needs t and phi columns");

  std::vector<std::pair<size_t, size_t>> phases;  // row ranges
  size_t start = 0;
  std::string cur_mode = t.rows.empty() || cmode < 0 ? "" : t.rows[0][cmode];
  for (size_t i = 1; i < t.rows.size(); ++i) {
    const std::string m = cmode < 0 ? "" : t.rows[i][cmode];
    if (m != cur_mode) {
      phases.push_back({start, i});
      start = i;
      cur_mode = m;
    }
  }
  phases.push_back({start, t.rows.size()});

  Series s;
  for (size_t p = 0; p < phases.size(); ++p) {
    const auto [lo, hi] = phases[p];
    if (hi <= lo) continue;
    const double denom = hi - lo > 1 ? static_cast<double>(hi - lo - 1) : 1.0;
    for (size_t i = lo; i < hi; ++i) {
      s.u.push_back(static_cast<double>(p) + static_cast<double>(i - lo) / denom);
      s.phi_deg.push_back(std::stod(t.rows[i][cphi]) * 180.0 / M_PI);
      double cp = std::numeric_limits<double>::quiet_NaN();
      if (c0x >= 0 && c0y >= 0) {
        const double x = std::stod(t.rows[i][c0x]);
        (void)c0y;
        cp = x * 100.0;  // tangential position of the first contact, cm
      }
      s.contact_pos_cm.push_back(cp);
    }
  }
  return s;
}

void draw_panel(Canvas& cv, double top, double height, double left, double width,
                const std::vector<Series>& all, bool use_phi, const std::string& label) {
  double lo = 1e300, hi = -1e300, umax = 0.0;
  for (const Series& s : all) {
    for (size_t i = 0; i < s.u.size(); ++i) {
      const double v = use_phi ? s.phi_deg[i] : s.contact_pos_cm[i];
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      umax = std::max(umax, s.u[i]);
    }
  }
  if (lo > hi) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-9) hi = lo + 1.0;
  umax = std::max(umax, 1.0);

  auto xp = [&](double u) { return left + width * (u / umax); };
  auto yp = [&](double v) { return top + height * (1.0 - (v - lo) / (hi - lo)); };

  cv.line(left, top + height, left + width, top + height, "black");
  cv.line(left, top, left, top + height, "black");
  cv.text(left - 8, top + 4, num(hi), 9, "end");
  cv.text(left - 8, top + height + 4, num(lo), 9, "end");
  cv.text(18, top + height / 2, label, 11);
  for (double u = 1.0; u < umax + 0.5; u += 1.0)
    cv.line(xp(u), top, xp(u), top + height, "#cccccc");

  // Individual trials.
  for (const Series& s : all) {
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < s.u.size(); ++i) {
      const double v = use_phi ? s.phi_deg[i] : s.contact_pos_cm[i];
      if (std::isnan(v)) continue;
      pts.push_back({xp(s.u[i]), yp(v)});
    }
    if (!pts.empty()) cv.polyline(pts, "#999999", 1.0);
  }

  // Mean across trials resampled on a fixed grid.
  const int grid_n = 120;
  std::vector<std::pair<double, double>> mean;
  for (int k = 0; k <= grid_n; ++k) {
    const double u = umax * k / grid_n;
    double sum = 0.0;
    int cnt = 0;
    for (const Series& s : all) {
      for (size_t i = 1; i < s.u.size(); ++i) {
        if (s.u[i - 1] <= u && u <= s.u[i]) {
          const double a = use_phi ? s.phi_deg[i - 1] : s.contact_pos_cm[i - 1];
          const double b = use_phi ? s.phi_deg[i] : s.contact_pos_cm[i];
          if (std::isnan(a) || std::isnan(b)) break;
          const double w = s.u[i] > s.u[i - 1] ? (u - s.u[i - 1]) / (s.u[i] - s.u[i - 1]) : 0.0;
          sum += a * (1 - w) + b * w;
          ++cnt;
          break;
        }
      }
    }
    if (cnt > 0) mean.push_back({xp(u), yp(sum / cnt)});
  }
  if (!mean.empty()) cv.polyline(mean, "#cc2222", 1.8);
}

}  // namespace

std::string trajectory_plot_svg(const std::vector<CsvTable>& trajectories) {
  if (trajectories.empty()) throw ConfigError("trajectory plot: no input files");
  std::vector<Series> all;
  for (const CsvTable& t : trajectories) {
    if (t.rows.empty()) throw ConfigError("trajectory plot: csv has no data rows");
    all.push_back(normalize_trajectory(t));
  }
  Canvas cv(640, 460);
  draw_panel(cv, 30, 180, 70, 540, all, true, "phi [deg]");
  draw_panel(cv, 250, 180, 70, 540, all, false, "contact x [cm]");
  cv.text(340, 452, "normalized time", 11);
  return cv.finish();
}

}  // namespace pfc::harness
