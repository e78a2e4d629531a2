#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "homext/scenario.hpp"

namespace homext {

/* Report files: report.json (schema homext-report-v1) plus one CSV per curve
   (columns s, re, im; '.' decimal, '\n' line endings, UTF-8). Reports are
   byte-identical for identical config and seed: fixed ordering everywhere and
   no timing data inside the artifact files (wall time goes to stdout). */

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline nlohmann::ordered_json report_json(const Config& cfg, const ScenarioResult& result) {
  nlohmann::ordered_json j;
  j["schema"] = "homext-report-v1";
  j["engine"] = {{"name", "homext"}, {"version", kVersion}};
  nlohmann::ordered_json scen = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.kv) scen[k] = v;  // std::map: sorted, stable
  j["scenario"] = scen;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  int failed = 0;
  for (const auto& c : result.checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["verifies"] = c.target;
    jc["value_re"] = c.value.real();
    jc["value_im"] = c.value.imag();
    jc["measure"] = c.measure;
    jc["tolerance"] = c.tolerance;
    jc["pass"] = c.pass;
    if (!c.note.empty()) jc["note"] = c.note;
    checks.push_back(jc);
    if (!c.pass) ++failed;
  }
  j["checks"] = checks;
  nlohmann::ordered_json curves = nlohmann::ordered_json::array();
  for (size_t i = 0; i < result.curves.size(); ++i) {
    nlohmann::ordered_json jc;
    jc["name"] = result.curves[i].name;
    jc["file"] = "curve_" + std::to_string(i) + ".csv";
    curves.push_back(jc);
  }
  j["curves"] = curves;
  j["notes"] = result.notes;
  j["summary"] = {{"checks", result.checks.size()},
                  {"failed", failed},
                  {"pass", failed == 0}};
  return j;
}

inline void write_report(const Config& cfg, const ScenarioResult& result,
                         const std::string& out_dir) {
  {
    std::ofstream out(out_dir + "/report.json", std::ios::binary);
    if (!out) throw Error("cannot write report to '" + out_dir + "'");
    out << report_json(cfg, result).dump(2) << "\n";
  }
  for (size_t i = 0; i < result.curves.size(); ++i) {
    std::ofstream csv(out_dir + "/curve_" + std::to_string(i) + ".csv", std::ios::binary);
    csv << "s,re,im\n";
    for (const auto& [s, v] : result.curves[i].rows)
      csv << format_double(s) << "," << format_double(v.real()) << ","
          << format_double(v.imag()) << "\n";
  }
}

}  // namespace homext
