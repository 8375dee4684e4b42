#pragma once

// `flowloss` command-line front end. Kept in a header so tests can drive the
// commands in-process; tools/flowloss_main.cpp is the thin executable.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "flowloss/flowloss.hpp"

namespace flowloss::cli {

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

/// FLOWLOSS_THREADS caps internal parallelism; results never depend on it.
inline unsigned thread_budget() {
  if (const char* env = std::getenv("FLOWLOSS_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// %.17g, with ".0" appended to integral values so reals stay reals.
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline std::string loss_report_json(const LossReport& report, const LossParams& params, bool has_saliency) {
  std::ostringstream os;
  os << "{\n  \"total\": " << format_real(report.total) << ",\n  \"patches\": [";
  for (std::size_t p = 0; p < report.per_patch.size(); ++p) {
    os << (p ? ",\n" : "\n") << "    {\"index\": " << p << ", \"origin\": [" << report.windows[p].row << ", "
       << report.windows[p].col << "], \"weight\": " << format_real(report.weights[p])
       << ", \"loss\": " << format_real(report.per_patch[p]) << ", \"salient_index\": " << report.salient[p]
       << "}";
  }
  os << "\n  ],\n  \"params\": {\"k\": " << params.patch_size << ", \"stride\": " << params.stride
     << ", \"tau\": " << format_real(params.tau) << ", \"sigma\": " << format_real(params.sigma)
     << ", \"eps\": " << format_real(params.eps) << ", \"saliency\": \""
     << (has_saliency ? "provided" : "fallback") << "\"}\n}\n";
  return os.str();
}

struct Inputs {
  FeatureMap features;
  FlowField flow;
  std::optional<SaliencyMap> saliency;
};

inline Inputs load_inputs(const std::string& features, const std::string& flow, const std::string& saliency) {
  Inputs in;
  in.features = to_feature_map(decode_tensor(read_file(features)));
  in.flow = read_flo(read_file(flow));
  if (!saliency.empty()) in.saliency = to_saliency_map(decode_tensor(read_file(saliency)));
  if (in.features.height != in.flow.height || in.features.width != in.flow.width) {
    throw Error(Errc::DimMismatch, "features have shape (" + std::to_string(in.features.channels) + ", " +
                                       std::to_string(in.features.height) + ", " +
                                       std::to_string(in.features.width) + ") but flow has shape (" +
                                       std::to_string(in.flow.height) + ", " + std::to_string(in.flow.width) +
                                       ")");
  }
  return in;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Motion-guided objectness loss and packed optical-flow codec", "flowloss"};
  app.require_subcommand(1);

  std::uint32_t scale = kDefaultScale;
  std::string flo_in, flo_out, tiff_path, pgm_out;
  bool stabilized = false;

  auto* encode = app.add_subcommand("encode", "Compress a .flo file into a packed-flow TIFF");
  encode->add_option("flo_path", flo_in, "input .flo")->required();
  encode->add_option("tiff_path", tiff_path, "output .tif")->required();
  encode->add_option("--scale", scale, "quantization steps per pixel")->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* decode = app.add_subcommand("decode", "Expand a packed-flow TIFF back to .flo");
  decode->add_option("tiff_path", tiff_path, "input .tif")->required();
  decode->add_option("flo_path", flo_out, "output .flo")->required();

  auto* stab = app.add_subcommand("stabilize", "Remove mean motion and normalize to [-1, 1]");
  stab->add_option("in_flo", flo_in, "input .flo")->required();
  stab->add_option("out_flo", flo_out, "output .flo")->required();

  auto* viz = app.add_subcommand("viz-norm", "Write the per-pixel flow magnitude as a P5 PGM");
  viz->add_option("in_flo", flo_in, "input .flo")->required();
  viz->add_option("out_pgm", pgm_out, "output .pgm")->required();
  viz->add_flag("--stabilized", stabilized, "apply background motion removal first");

  LossParams params;
  std::string features, flow_path, saliency, json_out;
  auto add_loss_inputs = [&](CLI::App* cmd) {
    cmd->add_option("--features", features, "feature TensorFile (C, H, W)")->required();
    cmd->add_option("--flow", flow_path, "raw .flo (stabilized internally)")->required();
    cmd->add_option("--saliency", saliency, "optional saliency TensorFile (H, W)");
    cmd->add_option("--k", params.patch_size, "patch size")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--stride", params.stride, "window stride")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--tau", params.tau, "softmax temperature")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--sigma", params.sigma, "RBF radius")->check(CLI::PositiveNumber)->capture_default_str();
  };

  auto* loss = app.add_subcommand("loss", "Evaluate the loss and write a JSON report");
  add_loss_inputs(loss);
  loss->add_option("--json", json_out, "report path (standard output when omitted)");

  GradCheckOptions check;
  check.samples = 200;
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare the analytic gradient with finite differences");
  add_loss_inputs(gradcheck);
  gradcheck->add_option("--step", check.step, "finite-difference step")->check(CLI::PositiveNumber)
      ->capture_default_str();
  gradcheck->add_option("--samples", check.samples, "coordinates to probe (0 = all)")->capture_default_str();
  gradcheck->add_option("--seed", check.seed, "coordinate sampling seed")->capture_default_str();
  gradcheck->add_flag("--corrupt-gradient", check.corrupt_analytic, "test hook")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "encode") {
      const auto raw = read_file(flo_in);
      const FlowField flow = read_flo(raw);
      const auto tiff = encode_tiff(pack(quantize(flow, scale)), scale);
      write_file(tiff_path, tiff);
      out << "original: " << raw.size() << " bytes\n"
          << "compressed: " << tiff.size() << " bytes\n"
          << "ratio: " << format_real(static_cast<double>(raw.size()) / static_cast<double>(tiff.size())) << "\n";
    } else if (command == "decode") {
      const DecodedTiff decoded = decode_tiff(read_file(tiff_path));
      write_file(flo_out, write_flo(dequantize(unpack(decoded.image, decoded.scale))));
    } else if (command == "stabilize") {
      write_file(flo_out, write_flo(stabilize(read_flo(read_file(flo_in)))));
    } else if (command == "viz-norm") {
      FlowField flow = read_flo(read_file(flo_in));
      if (stabilized) flow = stabilize(flow);
      write_file(pgm_out, encode_pgm(flow_norm_map(flow)));
    } else if (command == "loss") {
      Inputs in = load_inputs(features, flow_path, saliency);
      const FlowField flow = stabilize(in.flow, params.eps);
      const unsigned threads = thread_budget();
      const LossReport report = in.saliency ? flow_loss(in.features, flow, *in.saliency, params, threads)
                                            : flow_loss(in.features, flow, params, threads);
      const std::string json = loss_report_json(report, params, in.saliency.has_value());
      if (json_out.empty()) {
        out << json;
      } else {
        write_file(json_out, std::span(reinterpret_cast<const std::uint8_t*>(json.data()), json.size()));
      }
    } else if (command == "gradcheck") {
      Inputs in = load_inputs(features, flow_path, saliency);
      const FlowField flow = stabilize(in.flow, params.eps);
      check.threads = thread_budget();
      const GradCheckReport report = in.saliency ? finite_diff_check(in.features, flow, *in.saliency, params, check)
                                                 : finite_diff_check(in.features, flow, params, check);
      out << "coordinates: " << report.coordinates.size() << "\n"
          << "max_relative_error: " << format_real(report.max_relative) << "\n"
          << "mean_relative_error: " << format_real(report.mean_relative) << "\n";
      if (!(report.max_relative < 1e-5)) {
        err << "flowloss gradcheck: max relative error " << report.max_relative << " exceeds 1e-05\n";
        return 1;
      }
    }
  } catch (const std::exception& e) {
    err << "flowloss " << command << ": error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace flowloss::cli
