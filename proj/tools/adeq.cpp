#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "adeq/bounds.hpp"
#include "adeq/certificate_io.hpp"
#include "adeq/equivalence.hpp"
#include "adeq/htree.hpp"
#include "adeq/model.hpp"
#include "adeq/reference.hpp"

namespace {

using nlohmann::ordered_json;

std::string read_input(const std::string& path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    ss << in.rdbuf();
  }
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
}

struct ModelArgs {
  std::string model_path = "-";
  std::string mode = "bde";
  double epsilon = 0.0;
  std::string partition_text;
  std::string out;
  bool json = false;
};

void add_model_options(CLI::App* cmd, ModelArgs& args, bool with_epsilon = true) {
  cmd->add_option("model", args.model_path, "model file ('-' reads stdin)");
  cmd->add_option("--mode", args.mode, "equivalence flavor: bde or fde")
      ->check(CLI::IsMember({"bde", "fde"}));
  if (with_epsilon)
    cmd->add_option("--epsilon", args.epsilon, "equivalence tolerance")
        ->check(CLI::NonNegativeNumber);
  cmd->add_option("--partition", args.partition_text,
                  "initial partition, e.g. \"{x1} {x2 x3}\" (overrides the model stanza)");
  cmd->add_option("--out", args.out, "output file (default stdout)");
  cmd->add_flag("--json", args.json, "emit JSON instead of text");
}

adeq::Partition pick_partition(const adeq::ParsedModel& parsed, const std::string& flag,
                               bool required = false) {
  if (!flag.empty()) return adeq::parse_partition(flag, parsed.pivp);
  if (parsed.partition) return *parsed.partition;
  if (required)
    throw std::runtime_error(
        "no partition given: pass --partition or add a partition stanza");
  return adeq::Partition::single_block(parsed.pivp.size());
}

ordered_json blocks_json(const adeq::Partition& p, const adeq::PIVP& m) {
  ordered_json blocks = ordered_json::array();
  for (const auto& b : p.blocks()) {
    ordered_json names = ordered_json::array();
    for (adeq::VarId v : b) names.push_back(m.names[v]);
    blocks.push_back(std::move(names));
  }
  return blocks;
}

struct ReferenceResult {
  adeq::Partition partition;
  adeq::ExtendedPIVP extended;
  std::vector<double> sigma_star;
};

ReferenceResult run_reference(const adeq::ParsedModel& parsed, adeq::Mode mode,
                              double epsilon, const std::string& partition_flag) {
  ReferenceResult r{adeq::coarsest_partition(parsed.pivp,
                                             pick_partition(parsed, partition_flag),
                                             epsilon, mode),
                    adeq::extend(parsed.pivp),
                    {}};
  const adeq::ConstraintSystem c =
      adeq::build_constraints(r.extended, r.partition, mode);
  r.sigma_star = adeq::solve_reference(r.extended, c);
  return r;
}

int cmd_gen_htree(const adeq::HtreeOptions& opts, const std::string& out) {
  const adeq::HtreeModel model = adeq::gen_htree(opts);
  std::string text = "# h-tree rc network: depth=" + std::to_string(opts.depth) +
                     " eta=" + adeq::format_double(opts.eta) +
                     " vs=" + adeq::format_double(opts.vs) +
                     " seed=" + std::to_string(opts.seed) + "\n";
  text += serialize_model(model.pivp, &model.partition);
  write_output(out, text);
  return 0;
}

int cmd_reduce(const ModelArgs& args) {
  const adeq::ParsedModel parsed = adeq::parse_model(read_input(args.model_path));
  const adeq::Mode mode = adeq::parse_mode(args.mode);
  const adeq::Partition h = adeq::coarsest_partition(
      parsed.pivp, pick_partition(parsed, args.partition_text), args.epsilon, mode);
  if (args.json) {
    ordered_json j;
    j["mode"] = args.mode;
    j["epsilon"] = args.epsilon;
    j["blocks"] = blocks_json(h, parsed.pivp);
    write_output(args.out, j.dump(2) + "\n");
  } else {
    write_output(args.out, format_partition(h, parsed.pivp) + "\n");
  }
  return 0;
}

int cmd_reference(const ModelArgs& args) {
  const adeq::ParsedModel parsed = adeq::parse_model(read_input(args.model_path));
  const adeq::Mode mode = adeq::parse_mode(args.mode);
  const ReferenceResult r =
      run_reference(parsed, mode, args.epsilon, args.partition_text);
  const adeq::PIVP perturbed = adeq::instantiate(
      r.extended, std::span<const double>(r.sigma_star));
  const std::string model_text = serialize_model(perturbed, &r.partition);

  double dist_inf = 0.0, dist_sq = 0.0;
  ordered_json sigma = ordered_json::object();
  ordered_json moved = ordered_json::object();
  for (std::size_t i = 0; i < r.sigma_star.size(); ++i) {
    const std::string name = r.extended.name(static_cast<adeq::VarId>(i));
    sigma[name] = r.sigma_star[i];
    const double d = r.extended.sigma0[i] - r.sigma_star[i];
    dist_inf = std::max(dist_inf, std::abs(d));
    dist_sq += d * d;
    if (std::abs(d) > 1e-12)
      moved[name] = {r.extended.sigma0[i], r.sigma_star[i]};
  }

  if (args.json) {
    ordered_json j;
    j["mode"] = args.mode;
    j["epsilon"] = args.epsilon;
    j["blocks"] = blocks_json(r.partition, parsed.pivp);
    j["sigma_star"] = std::move(sigma);
    j["moved"] = std::move(moved);
    j["distance_inf"] = dist_inf;
    j["distance_2"] = std::sqrt(dist_sq);
    j["model"] = model_text;
    write_output(args.out, j.dump(2) + "\n");
  } else {
    write_output(args.out, model_text);
    char note[96];
    std::snprintf(note, sizeof note,
                  "reference: %zu coordinates moved, |.|_inf = %.3g\n",
                  moved.size(), dist_inf);
    std::cerr << note;
  }
  return 0;
}

int cmd_quotient(const ModelArgs& args) {
  const adeq::ParsedModel parsed = adeq::parse_model(read_input(args.model_path));
  const adeq::Mode mode = adeq::parse_mode(args.mode);
  const adeq::Partition h = pick_partition(parsed, args.partition_text, true);
  const adeq::PIVP q = mode == adeq::Mode::Backward
                           ? adeq::quotient_backward(parsed.pivp, h)
                           : adeq::quotient_forward(parsed.pivp, h);
  if (args.json) {
    ordered_json j;
    j["mode"] = args.mode;
    j["model"] = serialize_model(q);
    write_output(args.out, j.dump(2) + "\n");
  } else {
    write_output(args.out, serialize_model(q));
  }
  return 0;
}

int cmd_certify(const ModelArgs& args, const adeq::CertifyOptions& copts,
                std::uint64_t seed, int samples) {
  const adeq::ParsedModel parsed = adeq::parse_model(read_input(args.model_path));
  const adeq::Mode mode = adeq::parse_mode(args.mode);
  const ReferenceResult r =
      run_reference(parsed, mode, args.epsilon, args.partition_text);

  std::size_t moved_inits = 0;
  for (std::size_t i = 0; i < r.extended.n_states(); ++i)
    if (std::abs(r.extended.sigma0[i] - r.sigma_star[i]) > 1e-12) ++moved_inits;
  if (moved_inits > 0)
    std::cerr << "note: " << moved_inits
              << " state initial conditions were averaged to make the blocks compatible\n";

  const adeq::Certificate cert =
      adeq::certify(r.extended, std::span<const double>(r.extended.sigma0),
                    std::span<const double>(r.sigma_star), copts);

  ordered_json meta;
  meta["command"] = "certify";
  meta["mode"] = args.mode;
  meta["epsilon"] = args.epsilon;
  meta["tau"] = copts.tau;
  meta["dt"] = copts.dt;
  meta["safety"] = copts.safety;
  meta["seed"] = seed;
  meta["samples"] = samples;
  meta["rel_tol"] = copts.integrator.rel_tol;
  meta["abs_tol"] = copts.integrator.abs_tol;
  meta["model"] = args.model_path;
  meta["partition"] = format_partition(r.partition, parsed.pivp);
  ordered_json sigma = ordered_json::array();
  for (double v : r.sigma_star) sigma.push_back(v);
  meta["sigma_star"] = std::move(sigma);
  const ordered_json doc = adeq::certificate_to_json(cert, std::move(meta));

  if (args.json) {
    write_output(args.out.empty() ? "-" : args.out, doc.dump(2) + "\n");
  } else {
    if (!args.out.empty()) write_output(args.out, doc.dump(2) + "\n");
    double seconds = 0.0;
    for (const auto& [stage, span] : cert.timings) seconds += span;
    char summary[160];
    std::snprintf(summary, sizeof summary,
                  "time %.3fs  lambda %.3g  delta %.3g  |.|_inf %.3g  lambda*|.| %.3g\n",
                  seconds, cert.lambda, cert.delta, cert.distance_inf,
                  cert.lambda * cert.distance_inf);
    std::cout << format_partition(r.partition, parsed.pivp) << "\n"
              << adeq::render_certificate(cert) << summary;
  }
  return cert.verdict ? 0 : 2;
}

int cmd_validate(const ModelArgs& args, const std::string& cert_path, int samples,
                 std::uint64_t seed, int threads) {
  const adeq::ParsedModel parsed = adeq::parse_model(read_input(args.model_path));
  const ordered_json doc = ordered_json::parse(read_input(cert_path));
  ordered_json meta;
  const adeq::Certificate cert = adeq::certificate_from_json(doc, &meta);

  const adeq::ExtendedPIVP e = adeq::extend(parsed.pivp);
  std::vector<double> sigma_star = e.sigma0;
  if (meta.contains("sigma_star")) {
    sigma_star = meta.at("sigma_star").get<std::vector<double>>();
    if (sigma_star.size() != e.n_total())
      throw std::runtime_error("certificate sigma_star does not match the model");
  }

  adeq::CertifyOptions copts;
  copts.tau = cert.tau;
  copts.dt = cert.dt;
  copts.threads = threads;
  const adeq::ValidationReport report = adeq::validate_monte_carlo(
      e, std::span<const double>(sigma_star), cert, samples, seed, copts);

  if (args.json) {
    ordered_json j;
    j["samples"] = report.samples;
    j["radius"] = report.radius;
    j["lambda"] = report.lambda;
    j["max_ratio"] = report.max_ratio;
    j["pass"] = report.pass;
    if (report.witness_ratio)
      j["witness_ratio"] = *report.witness_ratio;
    else
      j["witness_ratio"] = nullptr;
    write_output(args.out, j.dump(2) + "\n");
  } else {
    std::cout << "samples   " << report.samples << "\n"
              << "radius    " << adeq::format_double(report.radius) << "\n"
              << "lambda    " << adeq::format_double(report.lambda) << "\n"
              << "max ratio " << adeq::format_double(report.max_ratio) << "\n";
    if (report.witness_ratio)
      std::cout << "witness   " << adeq::format_double(*report.witness_ratio) << "\n";
    std::cout << (report.pass ? "pass" : "FAIL: amplification exceeds lambda") << "\n";
  }
  return report.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"approximate differential equivalence toolkit"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-htree", "generate an h-tree rc network model");
  adeq::HtreeOptions gen_opts;
  std::string gen_out;
  gen->add_option("--depth", gen_opts.depth, "tree depth (1..8)")->required();
  gen->add_option("--eta", gen_opts.eta, "relative tolerance of the rc draws");
  gen->add_option("--vs", gen_opts.vs, "source voltage");
  gen->add_option("--seed", gen_opts.seed, "rng seed");
  gen->add_option("--out", gen_out, "output file (default stdout)");

  ModelArgs reduce_args;
  auto* reduce = app.add_subcommand("reduce", "coarsest approximate equivalence");
  add_model_options(reduce, reduce_args);

  ModelArgs ref_args;
  auto* reference = app.add_subcommand("reference", "nearest exactly reducible model");
  add_model_options(reference, ref_args);

  ModelArgs quot_args;
  auto* quotient = app.add_subcommand("quotient", "reduced model for an exact partition");
  add_model_options(quotient, quot_args, false);

  ModelArgs cert_args;
  adeq::CertifyOptions cert_opts;
  std::uint64_t cert_seed = 0;
  int cert_samples = 100;
  auto* certify = app.add_subcommand("certify", "error bound certificate");
  add_model_options(certify, cert_args);
  certify->add_option("--tau", cert_opts.tau, "time horizon")->check(CLI::PositiveNumber);
  certify->add_option("--dt", cert_opts.dt, "grid step")->check(CLI::PositiveNumber);
  certify->add_option("--safety", cert_opts.safety, "box inflation factor");
  certify->add_option("--seed", cert_seed, "rng seed recorded for validation");
  certify->add_option("--samples", cert_samples, "sample count recorded for validation");
  certify->add_option("--threads", cert_opts.threads, "worker threads (0 = auto)");

  ModelArgs val_args;
  std::string val_cert;
  int val_samples = 100;
  std::uint64_t val_seed = 0;
  int val_threads = 0;
  auto* validate = app.add_subcommand("validate", "monte-carlo check of a certificate");
  validate->add_option("model", val_args.model_path, "model file ('-' reads stdin)");
  validate->add_option("--cert", val_cert, "certificate json")->required();
  validate->add_option("--samples", val_samples, "number of random perturbations");
  validate->add_option("--seed", val_seed, "rng seed");
  validate->add_option("--threads", val_threads, "worker threads (0 = auto)");
  validate->add_option("--out", val_args.out, "output file (default stdout)");
  validate->add_flag("--json", val_args.json, "emit JSON instead of text");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_htree(gen_opts, gen_out);
    if (reduce->parsed()) return cmd_reduce(reduce_args);
    if (reference->parsed()) return cmd_reference(ref_args);
    if (quotient->parsed()) return cmd_quotient(quot_args);
    if (certify->parsed()) return cmd_certify(cert_args, cert_opts, cert_seed, cert_samples);
    if (validate->parsed()) return cmd_validate(val_args, val_cert, val_samples, val_seed, val_threads);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
