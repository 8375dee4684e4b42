// Writes the committed CLI fixtures and their golden totals.
//
//   make_fixtures <output-dir>
//
// Golden totals come from the brute-force oracle evaluated on the exact
// values stored in the files (the .flo narrows to float32).

#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "flowloss_cli.hpp"
#include "oracle/brute_force.hpp"
#include "support/generators.hpp"

using namespace flowloss;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: make_fixtures <output-dir>\n");
    return 2;
  }
  const std::string dir = argv[1];
  std::mt19937_64 rng(2024);
  const FeatureMap features = testkit::random_features(4, 6, 6, rng);
  const FlowField flow = testkit::random_flow(6, 6, rng, 2.0);
  const SaliencyMap saliency = testkit::random_saliency(6, 6, rng);

  cli::write_file(dir + "/fixture_features.flkt", encode_tensor(to_tensor(features)));
  cli::write_file(dir + "/fixture_flow.flo", write_flo(flow));
  cli::write_file(dir + "/fixture_saliency.flkt", encode_tensor(to_tensor(saliency)));

  const FlowField stored = read_flo(cli::read_file(dir + "/fixture_flow.flo"));
  oracle::Problem pb;
  pb.channels = features.channels;
  pb.height = features.height;
  pb.width = features.width;
  pb.features = features.values;
  pb.flow_u = stored.u;
  pb.flow_v = stored.v;
  const double fallback_total = oracle::brute_force_loss<double>(pb).total;
  pb.saliency = &saliency.values;
  const double saliency_total = oracle::brute_force_loss<double>(pb).total;

  std::ofstream golden(dir + "/fixture_golden.json");
  golden << "{\n  \"fallback_total\": " << cli::format_real(fallback_total)
         << ",\n  \"saliency_total\": " << cli::format_real(saliency_total) << "\n}\n";
  return 0;
}
