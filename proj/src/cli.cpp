// SPDX-License-Identifier: Apache-2.0
#include "hgfp/cli.hpp"

#include <CLI11.hpp>

#include <optional>
#include <ostream>
#include <sstream>

#include "hgfp/codec.hpp"
#include "hgfp/io_formats.hpp"
#include "hgfp/report.hpp"
#include "hgfp/synth.hpp"
#include "hgfp/verify.hpp"

namespace hgfp::cli {

ExitCode exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::BadMagic:
    case ErrorKind::Version:
    case ErrorKind::Truncation:
    case ErrorKind::Shape:
    case ErrorKind::NonFinite:
      return kIoError;
    case ErrorKind::PositionMismatch:
      return kPositionMismatch;
    case ErrorKind::Corruption:
    case ErrorKind::Decode:
    case ErrorKind::LengthMismatch:
      return kCorruption;
    case ErrorKind::Config:
    case ErrorKind::OutOfBounds:
    case ErrorKind::DynamicRange:
      return kInvalidInput;
  }
  return kInvalidInput;
}

namespace {

struct Options {
  std::string points;
  std::string grid;
  std::string stream;
  std::string config;
  std::string out;
  std::string bbox;
  std::string report = "text";
  double quant_step = QuantParams{}.step;
  bool raw = false;
  std::uint64_t seed = 0;
  // synth
  int dims = 3;
  std::size_t n_points = 1000;
  int n_clusters = 1;
  double cluster_std = 0.05;
};

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::Config, "--bbox: cannot parse '" + item + "'");
    }
  }
  return values;
}

/// "min0,..,min{d-1},max0,..,max{d-1}"
BoundingBox parse_bbox(const std::string& text, int dims) {
  const std::vector<double> v = parse_number_list(text);
  if (v.size() != static_cast<std::size_t>(2 * dims))
    fail(ErrorKind::Config, "--bbox needs " + std::to_string(2 * dims) + " comma-separated values");
  Point lo(dims), hi(dims);
  for (int k = 0; k < dims; ++k) {
    lo[k] = v[static_cast<std::size_t>(k)];
    hi[k] = v[static_cast<std::size_t>(dims + k)];
  }
  return BoundingBox(lo, hi);
}

BoundingBox resolve_bbox(const Options& o, const PointSet& points) {
  return o.bbox.empty() ? enclosing_box(points) : parse_bbox(o.bbox, points.dims());
}

GridConfig resolve_config(const Options& o, int dims) {
  return o.config.empty() ? default_config(dims) : load_config(o.config, dims);
}

QuantParams resolve_quant(const Options& o) {
  const QuantParams q = o.raw ? QuantParams::raw() : QuantParams::quantized(o.quant_step);
  q.validate();
  return q;
}

void print_report(const Options& o, const RunReport& r, std::ostream& out) {
  out << (o.report == "records" ? render_records(r) : render_text(r));
}

int cmd_encode(const Options& o, std::ostream& out, std::ostream& err) {
  const PointSet points = load_points(o.points);
  const HashGrid<float> grid = load_grid(o.grid);
  if (!o.config.empty() && !(load_config(o.config, grid.config().dims) == grid.config())) {
    err << "encode: --config does not match the grid file's config\n";
    return kInvalidInput;
  }
  if (points.dims() != grid.config().dims) {
    err << "encode: points have " << points.dims() << " dims, grid has " << grid.config().dims << "\n";
    return kInvalidInput;
  }
  const BoundingBox bbox = resolve_bbox(o, points);
  const QuantParams quant = resolve_quant(o);

  const ValidityMask mask = compute_validity(points, grid.config(), bbox);
  const PrunedBitstream pruned = encode_with_mask(grid, mask, bbox, quant);
  const PrunedBitstream unpruned = encode_with_mask(grid, ValidityMask::all_valid(grid.config()), bbox, quant);
  const std::vector<std::uint8_t> bytes = pruned.serialize();
  write_file(o.out, bytes);

  std::vector<std::uint64_t> full, kept;
  for (const auto& p : unpruned.payloads) full.push_back(p.size());
  for (const auto& p : pruned.payloads) kept.push_back(p.size());
  RunReport report = make_report(mask, grid.config(), full, kept);
  const std::uint64_t unpruned_total = unpruned.total_bytes();
  report.stream = StreamSizes{unpruned_total, bytes.size(), reduction_percent(unpruned_total, bytes.size())};
  print_report(o, report, out);
  return kSuccess;
}

int cmd_decode(const Options& o, std::ostream&, std::ostream&) {
  const PointSet points = load_points(o.points);
  const PrunedBitstream stream = PrunedBitstream::parse(read_file(o.stream));
  save_grid(decode_grid<float>(stream, points), o.out);
  return kSuccess;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream&) {
  const HashGrid<float> grid = load_grid(o.grid);
  const PointSet points = load_points(o.points);
  const PrunedBitstream stream = PrunedBitstream::parse(read_file(o.stream));
  const VerificationResult result = verify_stream(grid, points, stream);
  out << result.summary() << "\n";
  return result.passed() ? kSuccess : kVerificationFailed;
}

int cmd_stats(const Options& o, std::ostream& out, std::ostream&) {
  const PointSet points = load_points(o.points);
  const GridConfig cfg = resolve_config(o, points.dims());
  if (cfg.dims != points.dims()) fail(ErrorKind::Config, "stats: config dims differ from point dims");
  const ValidityMask mask = compute_validity(points, cfg, resolve_bbox(o, points));
  print_report(o, storage_report(mask, cfg), out);
  return kSuccess;
}

int cmd_synth(const Options& o, std::ostream& out, std::ostream&) {
  SynthSpec spec;
  spec.dims = o.dims;
  spec.n_points = o.n_points;
  spec.n_clusters = o.n_clusters;
  spec.cluster_std = o.cluster_std;
  spec.seed = o.seed;
  spec.bbox = o.bbox.empty() ? BoundingBox(Point::Zero(o.dims), Point::Ones(o.dims)) : parse_bbox(o.bbox, o.dims);
  save_points(generate_points(spec), o.out);
  out << "wrote " << spec.n_points << " points to " << o.out << "\n";
  if (!o.grid.empty()) {
    const GridConfig cfg = resolve_config(o, o.dims);
    save_grid(random_grid(cfg, o.seed), o.grid);
    out << "wrote random grid to " << o.grid << "\n";
  }
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hash-grid feature pruning: encode only the grid rows a point set can read"};
  app.require_subcommand(1);
  Options o;

  auto add_report = [&](CLI::App* c) {
    c->add_option("--report", o.report, "Report format")->check(CLI::IsMember({"text", "records"}));
  };
  auto add_config = [&](CLI::App* c) { c->add_option("--config", o.config, "Grid config (JSON)"); };
  auto add_bbox = [&](CLI::App* c) {
    c->add_option("--bbox", o.bbox, "min0,..,max0,.. (default: enclosing box of the points)");
  };

  CLI::App* encode = app.add_subcommand("encode", "Prune and entropy-code a grid");
  encode->add_option("--points", o.points, "Point set file")->required();
  encode->add_option("--grid", o.grid, "Grid file")->required();
  encode->add_option("--out", o.out, "Output bitstream")->required();
  encode->add_option("--quant-step", o.quant_step, "Uniform quantization step");
  encode->add_flag("--raw", o.raw, "Store valid features as raw f32");
  add_config(encode);
  add_bbox(encode);
  add_report(encode);

  CLI::App* decode = app.add_subcommand("decode", "Rebuild a grid from a bitstream and the same points");
  decode->add_option("--stream", o.stream, "Input bitstream")->required();
  decode->add_option("--points", o.points, "Point set file")->required();
  decode->add_option("--out", o.out, "Output grid file")->required();

  CLI::App* verify = app.add_subcommand("verify", "Check decoded inference against the original grid");
  verify->add_option("--grid", o.grid, "Original grid file")->required();
  verify->add_option("--points", o.points, "Point set file")->required();
  verify->add_option("--stream", o.stream, "Bitstream")->required();

  CLI::App* stats = app.add_subcommand("stats", "Report per-level valid ratios for a point set");
  stats->add_option("--points", o.points, "Point set file")->required();
  add_config(stats);
  add_bbox(stats);
  add_report(stats);

  CLI::App* synth = app.add_subcommand("synth", "Generate a clustered point set (and optionally a random grid)");
  synth->add_option("--out", o.out, "Output point set file")->required();
  synth->add_option("--seed", o.seed, "Random seed");
  synth->add_option("--dims", o.dims, "Dimensions")->check(CLI::Range(1, 3));
  synth->add_option("--n-points", o.n_points, "Number of points")->check(CLI::PositiveNumber);
  synth->add_option("--n-clusters", o.n_clusters, "Number of clusters")->check(CLI::PositiveNumber);
  synth->add_option("--cluster-std", o.cluster_std, "Cluster std as a fraction of the box extent");
  synth->add_option("--grid", o.grid, "Also write a random grid here");
  add_config(synth);
  add_bbox(synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*encode) return cmd_encode(o, out, err);
    if (*decode) return cmd_decode(o, out, err);
    if (*verify) return cmd_verify(o, out, err);
    if (*stats) return cmd_stats(o, out, err);
    if (*synth) return cmd_synth(o, out, err);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"hgfp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace hgfp::cli
