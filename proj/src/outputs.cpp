#include "statenet/outputs.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace statenet {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // no platform newline translation
  if (!out) throw EvaluationError("cannot open output file: " + path.string());
  return out;
}

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& traj) {
  auto out = open_out(path);
  const std::size_t n = traj.states.front().size();
  out << "iter";
  for (std::size_t i = 0; i < n; ++i) out << ",x_" << i;
  out << "\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    out << k;
    for (double v : traj.states[k]) out << ',' << format_double(v);
    out << "\n";
  }
}

void write_lyapunov_csv(const std::filesystem::path& path, const DriftLedger& ledger) {
  auto out = open_out(path);
  out << "iter,V,drift,bound,ok\n";
  for (std::size_t k = 0; k < ledger.entries.size(); ++k) {
    const auto& e = ledger.entries[k];
    out << k << ',' << format_double(e.v) << ',' << format_double(e.drift) << ','
        << format_double(e.bound) << ',' << (e.satisfied ? 1 : 0) << "\n";
  }
}

void write_flow_trajectory_csv(const std::filesystem::path& path, const FlowTrajectory& traj) {
  auto out = open_out(path);
  const std::size_t n = traj.samples.front().x.size();
  out << "iter";
  for (std::size_t i = 0; i < n; ++i) out << ",x_" << i;
  out << "\n";
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    out << k;
    for (double v : traj.samples[k].x) out << ',' << format_double(v);
    out << "\n";
  }
}

void write_flow_network_csv(const std::filesystem::path& path, const FlowTrajectory& traj) {
  auto out = open_out(path);
  const int n = traj.samples.front().lambda.size();
  out << "iter,t";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != i) out << ",lambda_" << i << '_' << j;
    }
  }
  out << "\n";
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto& s = traj.samples[k];
    out << k << ',' << format_double(s.t);
    for (int p = 0; p < s.lambda.pair_count(); ++p) out << ',' << format_double(s.lambda.flat(p));
    out << "\n";
  }
}

nlohmann::json summary_json(const RunArtifacts& a) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : a.clusters.clusters) {
    clusters.push_back({{"value", c.value}, {"size", c.size}, {"lo", c.lo}, {"hi", c.hi}});
  }
  return nlohmann::json{
      {"schema", "statenet-summary/1"},
      {"preset", a.preset},
      {"family", a.family},
      {"n", a.n},
      {"seed", a.seed},
      {"status", status_name(a.status)},
      {"iterations", a.iterations},
      {"residual", a.residual},
      {"final_lyapunov", a.final_lyapunov},
      {"clusters", clusters},
      {"cluster_count", static_cast<int>(a.clusters.clusters.size())},
      {"min_cluster_separation",
       a.clusters.clusters.size() > 1 ? a.clusters.min_separation : 0.0},
      {"violations",
       {{"asserted_bound", a.ledger.violations},
        {"observational_increases", a.ledger.observational_increases},
        {"significant_increases", a.ledger.significant_increases},
        {"tie_hits", a.ledger.tie_hits},
        {"strict_decrease_exceptions", a.ledger.strict_decrease_exceptions},
        {"domain", a.ledger.domain_violations}}},
  };
}

void write_summary_json(const std::filesystem::path& path, const nlohmann::json& summary) {
  auto out = open_out(path);
  out << summary.dump(2) << "\n";
}

std::vector<std::string> validate_summary(const nlohmann::json& s) {
  std::vector<std::string> bad;
  auto need = [&](const char* key, bool ok) {
    if (!ok) bad.push_back(key);
  };
  need("schema", s.contains("schema") && s["schema"] == "statenet-summary/1");
  need("preset", s.contains("preset") && s["preset"].is_string());
  need("family", s.contains("family") && s["family"].is_string());
  need("n", s.contains("n") && s["n"].is_number_integer());
  need("seed", s.contains("seed") && s["seed"].is_number());
  need("status", s.contains("status") && s["status"].is_string() &&
                     (s["status"] == "converged" || s["status"] == "max_iters" ||
                      s["status"] == "diverged"));
  need("iterations", s.contains("iterations") && s["iterations"].is_number_integer());
  need("residual", s.contains("residual") && s["residual"].is_number());
  need("final_lyapunov", s.contains("final_lyapunov") && s["final_lyapunov"].is_number());
  need("clusters", s.contains("clusters") && s["clusters"].is_array());
  need("cluster_count", s.contains("cluster_count") && s["cluster_count"].is_number_integer());
  need("min_cluster_separation",
       s.contains("min_cluster_separation") && s["min_cluster_separation"].is_number());
  need("violations", s.contains("violations") && s["violations"].is_object());
  if (s.contains("violations") && s["violations"].is_object()) {
    for (const char* key : {"asserted_bound", "observational_increases", "significant_increases",
                            "tie_hits", "strict_decrease_exceptions", "domain"}) {
      if (!s["violations"].contains(key) || !s["violations"][key].is_number_integer())
        bad.push_back(std::string("violations.") + key);
    }
  }
  if (s.contains("clusters") && s["clusters"].is_array()) {
    for (const auto& c : s["clusters"]) {
      if (!c.is_object() || !c.contains("value") || !c.contains("size")) {
        bad.push_back("clusters[]");
        break;
      }
    }
  }
  return bad;
}

// ---------------------------------------------------------------------------
// CSV reading and SVG rendering
// ---------------------------------------------------------------------------

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EvaluationError("cannot read CSV: " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw EvaluationError("malformed CSV (empty): " + path.string());
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  if (table.header.empty()) throw EvaluationError("malformed CSV header: " + path.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Vec row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw EvaluationError("malformed CSV cell '" + cell + "' in " + path.string());
      }
    }
    if (row.size() != table.header.size())
      throw EvaluationError("malformed CSV row width in " + path.string());
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

struct Panel {
  double x0, y0, w, h;
  double lo_x, hi_x, lo_y, hi_y;

  double px(double x) const { return x0 + (x - lo_x) / (hi_x - lo_x) * w; }
  double py(double y) const { return y0 + h - (y - lo_y) / (hi_y - lo_y) * h; }
};

void axes(std::ostringstream& svg, const Panel& p, const std::string& label) {
  svg << "<rect x=\"" << fmt_coord(p.x0) << "\" y=\"" << fmt_coord(p.y0) << "\" width=\""
      << fmt_coord(p.w) << "\" height=\"" << fmt_coord(p.h)
      << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << fmt_coord(p.x0) << "\" y=\"" << fmt_coord(p.y0 - 6)
      << "\" font-family=\"monospace\" font-size=\"12\" fill=\"#222222\">" << label << "</text>\n";
}

void bounds(const std::vector<Vec>& rows, std::size_t col_begin, double& lo, double& hi) {
  lo = 1e300;
  hi = -1e300;
  for (const auto& r : rows) {
    for (std::size_t c = col_begin; c < r.size(); ++c) {
      lo = std::min(lo, r[c]);
      hi = std::max(hi, r[c]);
    }
  }
  if (!(lo < hi)) {
    lo -= 1.0;
    hi += 1.0;
  }
}

const char* kPalette[8] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                           "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

std::string render_svg(const CsvTable& trajectory, const CsvTable& lyapunov) {
  if (trajectory.header.empty() || trajectory.header[0] != "iter" || trajectory.rows.empty())
    throw EvaluationError("trajectory CSV must carry an 'iter' header and at least one row");
  const std::size_t n = trajectory.header.size() - 1;

  const double W = 960, H = 720;
  Panel top{60, 30, W - 90, (H - 110) * 0.62, 0, 0, 0, 0};
  Panel bot{60, top.y0 + top.h + 50, W - 90, (H - 110) * 0.38, 0, 0, 0, 0};

  top.lo_x = trajectory.rows.front()[0];
  top.hi_x = trajectory.rows.back()[0];
  if (!(top.lo_x < top.hi_x)) top.hi_x = top.lo_x + 1.0;
  bounds(trajectory.rows, 1, top.lo_y, top.hi_y);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"#ffffff\"/>\n";
  axes(svg, top, "state per agent vs iteration");

  for (std::size_t a = 0; a < n; ++a) {
    const char* color = kPalette[a % 8];
    if (trajectory.rows.size() == 1) {
      const auto& r = trajectory.rows[0];
      svg << "<circle cx=\"" << fmt_coord(top.px(r[0])) << "\" cy=\""
          << fmt_coord(top.py(r[a + 1])) << "\" r=\"2\" fill=\"" << color << "\"/>\n";
      continue;
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t k = 0; k < trajectory.rows.size(); ++k) {
      const auto& r = trajectory.rows[k];
      if (k) svg << ' ';
      svg << fmt_coord(top.px(r[0])) << ',' << fmt_coord(top.py(r[a + 1]));
    }
    svg << "\"/>\n";
  }

  axes(svg, bot, "Lyapunov value vs iteration");
  if (!lyapunov.rows.empty()) {
    bot.lo_x = lyapunov.rows.front()[0];
    bot.hi_x = lyapunov.rows.back()[0];
    if (!(bot.lo_x < bot.hi_x)) bot.hi_x = bot.lo_x + 1.0;
    double lo, hi;
    lo = 1e300;
    hi = -1e300;
    for (const auto& r : lyapunov.rows) {
      lo = std::min(lo, r[1]);
      hi = std::max(hi, r[1]);
    }
    if (!(lo < hi)) {
      lo -= 1.0;
      hi += 1.0;
    }
    bot.lo_y = lo;
    bot.hi_y = hi;
    if (lyapunov.rows.size() == 1) {
      svg << "<circle cx=\"" << fmt_coord(bot.px(lyapunov.rows[0][0])) << "\" cy=\""
          << fmt_coord(bot.py(lyapunov.rows[0][1])) << "\" r=\"2\" fill=\"#1f77b4\"/>\n";
    } else {
      svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < lyapunov.rows.size(); ++k) {
        if (k) svg << ' ';
        svg << fmt_coord(bot.px(lyapunov.rows[k][0])) << ','
            << fmt_coord(bot.py(lyapunov.rows[k][1]));
      }
      svg << "\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace statenet
