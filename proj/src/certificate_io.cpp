#include "adeq/certificate_io.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace adeq {

using nlohmann::ordered_json;

ordered_json certificate_to_json(const Certificate& cert, ordered_json meta) {
  ordered_json j;
  j["tau"] = cert.tau;
  j["dt"] = cert.dt;
  j["lambda0"] = cert.lambda0;
  j["lambda1"] = cert.lambda1;
  j["L"] = cert.L;
  j["C"] = cert.C;
  ordered_json dk = ordered_json::object();
  for (const auto& [k, d] : cert.dk) dk[std::to_string(k)] = d;
  j["dk"] = std::move(dk);
  j["lambda"] = cert.lambda;
  if (std::isfinite(cert.delta))
    j["delta"] = cert.delta;
  else
    j["delta"] = nullptr;
  j["distance_inf"] = cert.distance_inf;
  j["distance_2"] = cert.distance_2;
  j["verdict"] = cert.verdict;
  j["warnings"] = cert.warnings;

  if (!meta.contains("degree")) meta["degree"] = cert.degree;
  if (!meta.contains("method")) meta["method"] = cert.method;
  if (!meta.contains("lambda0_plus")) meta["lambda0_plus"] = cert.lambda0_plus;
  if (!meta.contains("lambda1_plus")) meta["lambda1_plus"] = cert.lambda1_plus;
  if (!meta.contains("max_condition")) meta["max_condition"] = cert.max_condition;
  ordered_json timings = ordered_json::object();
  for (const auto& [name, s] : cert.timings) timings[name] = s;
  if (!meta.contains("timings")) meta["timings"] = std::move(timings);
  j["meta"] = std::move(meta);
  return j;
}

Certificate certificate_from_json(const ordered_json& doc, ordered_json* meta_out) {
  Certificate cert;
  cert.tau = doc.at("tau").get<double>();
  cert.dt = doc.at("dt").get<double>();
  cert.lambda0 = doc.at("lambda0").get<double>();
  cert.lambda1 = doc.at("lambda1").get<double>();
  cert.L = doc.at("L").get<double>();
  cert.C = doc.at("C").get<double>();
  for (const auto& [key, value] : doc.at("dk").items())
    cert.dk[static_cast<unsigned>(std::stoul(key))] = value.get<double>();
  cert.lambda = doc.at("lambda").get<double>();
  cert.delta = doc.at("delta").is_null() ? std::numeric_limits<double>::infinity()
                                         : doc.at("delta").get<double>();
  cert.distance_inf = doc.at("distance_inf").get<double>();
  cert.distance_2 = doc.at("distance_2").get<double>();
  cert.verdict = doc.at("verdict").get<bool>();
  cert.warnings = doc.at("warnings").get<std::vector<std::string>>();

  const auto& meta = doc.at("meta");
  if (meta.contains("degree")) cert.degree = meta.at("degree").get<unsigned>();
  if (meta.contains("method")) cert.method = meta.at("method").get<std::string>();
  if (meta.contains("lambda0_plus"))
    cert.lambda0_plus = meta.at("lambda0_plus").get<double>();
  if (meta.contains("lambda1_plus"))
    cert.lambda1_plus = meta.at("lambda1_plus").get<double>();
  if (meta.contains("max_condition"))
    cert.max_condition = meta.at("max_condition").get<double>();
  if (meta.contains("timings"))
    for (const auto& [name, s] : meta.at("timings").items())
      cert.timings[name] = s.get<double>();
  if (meta_out) *meta_out = meta;
  return cert;
}

std::string render_certificate(const Certificate& cert) {
  std::ostringstream out;
  const auto line = [&out](const std::string& key, const std::string& value) {
    out << "  " << key;
    for (std::size_t i = key.size(); i < 14; ++i) out << ' ';
    out << value << "\n";
  };
  line("tau", format_double(cert.tau));
  line("dt", format_double(cert.dt));
  line("L", format_double(cert.L));
  line("C", format_double(cert.C));
  line("lambda0", format_double(cert.lambda0));
  line("lambda1", format_double(cert.lambda1));
  line("lambda", format_double(cert.lambda));
  for (const auto& [k, d] : cert.dk) line("d" + std::to_string(k), format_double(d));
  line("delta", std::isfinite(cert.delta) ? format_double(cert.delta) : "unbounded");
  line("|sigma0-s*|", format_double(cert.distance_inf));
  line("||.||_2", format_double(cert.distance_2));
  line("verdict", cert.verdict ? "true" : "false");
  for (const auto& w : cert.warnings) out << "  warning: " << w << "\n";
  return out.str();
}

}  // namespace adeq
