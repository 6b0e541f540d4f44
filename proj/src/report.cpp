#include "nnreflex/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <sstream>

namespace nnreflex {

namespace {

using nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_number(const std::optional<double>& v) { return v ? number_or_null(*v) : json(nullptr); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string optional_sig6(const std::optional<double>& v) { return v ? format_sig6(*v) : ""; }

/// Integral cells print as integers, weighted cells with four decimals.
std::string cell(double v) {
  char buf[64];
  if (std::fabs(v - std::round(v)) < 1e-9) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.4f", v);
  }
  return buf;
}

std::string fixed4(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "NA" : (v > 0 ? "Inf" : "-Inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void row(std::ostringstream& os, const std::string& label, const std::vector<std::string>& cells,
         int label_width = 22, int width = 10) {
  os << "  " << std::left << std::setw(label_width) << label << std::right;
  for (const auto& c : cells) os << std::setw(width) << c;
  os << '\n';
}

}  // namespace

std::string format_sig6(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string short_label(const TestResult& r) {
  const std::string side = r.alternative == Alternative::right  ? ">"
                           : r.alternative == Alternative::left ? "<"
                                                                : "";
  if (r.name == "x2_p") return "X2_P";
  if (r.name == "x2_p_yates") return "X2_P(Yates)";
  if (r.name == "z_dir") return "Zdir" + side;
  if (r.name == "fisher") return "TF" + side;
  if (r.name == "x2_r") return "X2_R";
  if (r.name == "z_sr") return "Zsr" + side;
  if (r.name == "z_mnr") return "Zmnr" + side;
  if (r.name == "n_i") return "N_I";
  if (r.name == "z_ii") {
    const std::string i = r.class_index ? std::to_string(*r.class_index) : "i";
    return "Z" + i + i + side;
  }
  return r.name + side;
}

json to_json(const TestResult& r) {
  json j;
  j["name"] = r.name;
  j["comparison"] = r.comparison;
  j["class_index"] = r.class_index ? json(*r.class_index) : json(nullptr);
  j["alternative"] = std::string(to_string(r.alternative));
  j["statistic"] = number_or_null(r.statistic);
  j["p_asymptotic"] = optional_number(r.p_asymptotic);
  j["p_randomization"] = optional_number(r.p_randomization);
  j["reference"] = r.reference;
  json diag = json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = number_or_null(v);
  j["diagnostics"] = diag;
  j["error"] = r.error ? json(*r.error) : json(nullptr);
  return j;
}

json to_json(const BatteryReport& report) {
  json j;
  j["tool"] = "nnreflex";
  j["version"] = kVersion;
  const Provenance& p = report.input;
  j["input"] = {{"source", p.source},
                {"rows", p.rows},
                {"class_names", p.class_names},
                {"class_sizes", p.class_sizes},
                {"bounding_box", {p.x_min, p.x_max, p.y_min, p.y_max}}};
  if (p.window) {
    j["input"]["window"] = {p.window->x_min, p.window->x_max, p.window->y_min, p.window->y_max};
  }
  const RunSettings& s = report.settings;
  j["settings"] = {{"alpha", s.alpha},   {"n_mc", s.n_mc},           {"seed", s.seed},
                   {"weighting", s.weighting}, {"tie_epsilon", s.tie_epsilon}, {"tests", s.tests},
                   {"posthoc", s.posthoc ? json(*s.posthoc) : json(nullptr)}};
  json sections = json::array();
  for (const ReportSection& sec : report.sections) {
    json js;
    js["comparison"] = sec.comparison;
    js["class_names"] = sec.class_names;
    js["class_sizes"] = sec.class_sizes;
    js["nn_rct"] = {{"self_reflexive", sec.rct.self_reflexive},
                    {"mixed_reflexive", sec.rct.mixed_reflexive},
                    {"self_nonreflexive", sec.rct.self_nonreflexive},
                    {"mixed_nonreflexive", sec.rct.mixed_nonreflexive}};
    json nnct = json::array();
    for (std::size_t i = 0; i < sec.nnct.num_classes(); ++i) {
      json rowj = json::array();
      for (std::size_t k = 0; k < sec.nnct.num_classes(); ++k) rowj.push_back(sec.nnct(i, k));
      nnct.push_back(rowj);
    }
    js["nnct"] = nnct;
    js["scct"] = {{"self", sec.scct.self}, {"mixed", sec.scct.mixed}};
    js["q"] = sec.q;
    js["r"] = sec.r;
    json results = json::array();
    for (const TestResult& r : sec.results) results.push_back(to_json(r));
    js["results"] = results;
    sections.push_back(js);
  }
  j["sections"] = sections;
  j["warnings"] = report.warnings;
  return j;
}

std::string battery_csv(const BatteryReport& report) {
  std::ostringstream os;
  os << "comparison,test,class,alternative,statistic,p_asymptotic,p_randomization,reference,error\n";
  for (const ReportSection& sec : report.sections) {
    for (const TestResult& r : sec.results) {
      os << csv_field(r.comparison) << ',' << r.name << ','
         << (r.class_index ? std::to_string(*r.class_index) : "") << ',' << to_string(r.alternative) << ','
         << format_sig6(r.statistic) << ',' << optional_sig6(r.p_asymptotic) << ','
         << optional_sig6(r.p_randomization) << ',' << csv_field(r.reference) << ','
         << csv_field(r.error.value_or("")) << '\n';
    }
  }
  return os.str();
}

std::string tables_text(const ReportSection& sec) {
  std::ostringstream os;
  const NnRct& t = sec.rct;
  os << "NN-RCT (" << sec.comparison << ")\n";
  row(os, "", {"self", "mixed", "total"});
  row(os, "reflexive", {cell(t.self_reflexive), cell(t.mixed_reflexive), cell(t.reflexive())});
  row(os, "non-reflexive", {cell(t.self_nonreflexive), cell(t.mixed_nonreflexive), cell(t.nonreflexive())});
  row(os, "total", {cell(t.self()), cell(t.mixed()), cell(t.total())});
  os << '\n';

  const std::size_t k = sec.scct.num_classes();
  os << "SCCT (base class by pair type)\n";
  row(os, "", {"self", "mixed", "total"});
  for (std::size_t i = 0; i < k; ++i) {
    row(os, sec.class_names[i], {cell(sec.scct.self[i]), cell(sec.scct.mixed[i]),
                                 cell(sec.scct.self[i] + sec.scct.mixed[i])});
  }
  row(os, "total", {cell(sec.scct.self_total()), cell(sec.scct.mixed_total()),
                    cell(sec.scct.self_total() + sec.scct.mixed_total())});
  os << '\n';

  if (sec.nnct.num_classes() == k && k > 0) {
    os << "NNCT (base class by NN class)\n";
    std::vector<std::string> header(sec.class_names.begin(), sec.class_names.end());
    header.push_back("total");
    row(os, "", header);
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<std::string> cells;
      for (std::size_t c = 0; c < k; ++c) cells.push_back(cell(sec.nnct(i, c)));
      cells.push_back(cell(sec.nnct.row_sum(i)));
      row(os, sec.class_names[i], cells);
    }
    std::vector<std::string> totals;
    for (std::size_t c = 0; c < k; ++c) totals.push_back(cell(sec.nnct.col_sum(c)));
    totals.push_back(cell(sec.nnct.total()));
    row(os, "total", totals);
    os << '\n';
  }
  os << "  Q = " << cell(sec.q) << ", R = " << cell(sec.r) << '\n';
  return os.str();
}

std::string battery_text(const BatteryReport& report) {
  std::ostringstream os;
  const Provenance& p = report.input;
  os << "Input: " << p.source << " (" << p.rows << " points;";
  for (std::size_t i = 0; i < p.class_names.size(); ++i) {
    os << ' ' << p.class_names[i] << '=' << p.class_sizes[i] << (i + 1 < p.class_names.size() ? "," : "");
  }
  os << ")\n\n";
  for (const ReportSection& sec : report.sections) {
    os << tables_text(sec) << '\n';
    if (sec.results.empty()) continue;
    std::vector<std::string> labels, ts, pa, pr;
    for (const TestResult& r : sec.results) {
      labels.push_back(short_label(r));
      ts.push_back(r.error ? "NA" : fixed4(r.statistic));
      pa.push_back(r.p_asymptotic ? fixed4(*r.p_asymptotic) : "-");
      pr.push_back(r.p_randomization ? fixed4(*r.p_randomization) : "-");
    }
    os << "Tests (" << sec.comparison << ")\n";
    row(os, "", labels, 8, 12);
    row(os, "TS", ts, 8, 12);
    row(os, "p_asy", pa, 8, 12);
    row(os, "p_rand", pr, 8, 12);
    for (const TestResult& r : sec.results) {
      if (r.error) os << "  " << short_label(r) << ": " << *r.error << '\n';
    }
    os << '\n';
  }
  for (const auto& w : report.warnings) os << "warning: " << w << '\n';
  return os.str();
}

json to_json(const SimulationReport& report, std::optional<double> runtime_seconds) {
  json j;
  j["tool"] = "nnreflex";
  j["version"] = kVersion;
  j["kind"] = report.kind;
  const SimulationOptions& o = report.options;
  j["options"] = {{"n_mc", o.n_mc},
                  {"backgrounds", o.backgrounds},
                  {"alpha", o.alpha},
                  {"seed", o.seed},
                  {"weighting", o.weighting == Weighting::pielou ? "pielou" : "ordered-edge"},
                  {"tie_epsilon", o.tie_epsilon}};
  j["runtime_seconds"] = runtime_seconds ? json(*runtime_seconds) : json(nullptr);
  json rows = json::array();
  for (const SimulationRow& r : report.rows) {
    json jr;
    jr["family"] = std::string(to_string(r.spec.family));
    jr["n1"] = r.spec.family == Family::rl_matern ? json(nullptr) : json(r.spec.n1);
    jr["n2"] = r.spec.family == Family::rl_matern ? json(nullptr) : json(r.spec.n2);
    jr["parameters"] = r.spec.parameters();
    jr["test"] = r.test;
    jr["replicates"] = r.replicates;
    jr["defined"] = r.defined;
    jr["rejections"] = r.rejections;
    jr["rate"] = r.rate;
    jr["mc_se"] = r.mc_se;
    jr["lower_band"] = optional_number(r.lower_band);
    jr["upper_band"] = optional_number(r.upper_band);
    jr["flag"] = r.flag ? json(std::string(to_string(*r.flag))) : json(nullptr);
    rows.push_back(jr);
  }
  j["rows"] = rows;
  j["warnings"] = report.warnings;
  return j;
}

std::string simulation_csv(const SimulationReport& report) {
  std::ostringstream os;
  os << "family,n1,n2,parameters,test,replicates,defined,rejections,rate,mc_se,lower_band,upper_band,flag\n";
  for (const SimulationRow& r : report.rows) {
    const bool matern = r.spec.family == Family::rl_matern;
    os << to_string(r.spec.family) << ',' << (matern ? "" : std::to_string(r.spec.n1)) << ','
       << (matern ? "" : std::to_string(r.spec.n2)) << ',' << csv_field(r.spec.parameters()) << ',' << r.test
       << ',' << r.replicates << ',' << r.defined << ',' << r.rejections << ',' << format_sig6(r.rate) << ','
       << format_sig6(r.mc_se) << ',' << optional_sig6(r.lower_band) << ',' << optional_sig6(r.upper_band) << ','
       << (r.flag ? std::string(to_string(*r.flag)) : "") << '\n';
  }
  return os.str();
}

std::string simulation_text(const SimulationReport& report) {
  // Group rows by spec, keeping the order of first appearance.
  std::vector<std::string> spec_keys;
  std::vector<std::string> tests;
  std::map<std::pair<std::string, std::string>, const SimulationRow*> cells;
  for (const SimulationRow& r : report.rows) {
    std::string key = std::string(to_string(r.spec.family));
    if (r.spec.family != Family::rl_matern) key += " " + std::to_string(r.spec.n1) + "," + std::to_string(r.spec.n2);
    if (!r.spec.parameters().empty()) key += " " + r.spec.parameters();
    if (std::find(spec_keys.begin(), spec_keys.end(), key) == spec_keys.end()) spec_keys.push_back(key);
    if (std::find(tests.begin(), tests.end(), r.test) == tests.end()) tests.push_back(r.test);
    cells[{key, r.test}] = &r;
  }
  std::size_t key_width = 8;
  for (const auto& k : spec_keys) key_width = std::max(key_width, k.size() + 1);
  std::size_t col_width = 8;
  for (const auto& t : tests) col_width = std::max(col_width, t.size() + 2);

  std::ostringstream os;
  os << (report.kind == "size" ? "Empirical size" : "Empirical power") << " at alpha = "
     << report.options.alpha << ", n_mc = " << report.options.n_mc;
  if (report.kind == "size") os << " (* liberal, - conservative)";
  os << '\n';
  os << std::left << std::setw(static_cast<int>(key_width)) << "spec" << std::right;
  for (const auto& t : tests) os << std::setw(static_cast<int>(col_width)) << t;
  os << '\n';
  for (const auto& k : spec_keys) {
    os << std::left << std::setw(static_cast<int>(key_width)) << k << std::right;
    for (const auto& t : tests) {
      const auto it = cells.find({k, t});
      std::string v = "-";
      if (it != cells.end() && it->second->defined > 0) {
        v = fixed4(it->second->rate);
        if (it->second->flag == SizeFlag::liberal) v += "*";
        if (it->second->flag == SizeFlag::conservative) v += "-";
      }
      os << std::setw(static_cast<int>(col_width)) << v;
    }
    os << '\n';
  }
  for (const auto& w : report.warnings) os << "warning: " << w << '\n';
  return os.str();
}

}  // namespace nnreflex
