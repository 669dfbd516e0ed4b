#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polypack/codegen.hpp"
#include "polypack/error.hpp"
#include "polypack/kernels.hpp"
#include "polypack/runtime.hpp"

namespace {

using namespace polypack;

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitCompile = 2;

struct Config {
  std::vector<std::string> kernels;
  std::string stur;
  std::string rule;
  std::vector<std::string> binds;
  std::string dtype = "f64";
  std::uint64_t seed = 1;
  std::vector<int> workers;
  std::vector<std::string> compressions;
  std::string emit_c;
  std::string csv;
  std::string output;
  bool corrupt = false;
  bool footprint_only = false;
  std::int64_t max_elements = std::int64_t{1} << 27;
};

struct Source {
  std::string label;
  Program program;
  std::string rule;
};

Source load_source(const Config& cfg, const std::string& kernel) {
  Source s;
  if (!kernel.empty()) {
    s.label = kernel;
    s.program = parse_program(builtin_kernel(kernel).source);
  } else {
    std::ifstream in(cfg.stur);
    if (!in) throw Error(ErrorKind::Io, "cannot open STUR file '" + cfg.stur + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    s.label = std::filesystem::path(cfg.stur).stem().string();
    s.program = parse_program(ss.str());
  }
  if (s.program.rules.empty()) throw Error(ErrorKind::UnknownIdentifier, "program has no rules");
  s.rule = cfg.rule.empty() ? s.program.rules.front().name() : cfg.rule;
  return s;
}

Binding parse_binds(const std::vector<std::string>& binds) {
  Binding b;
  for (const auto& text : binds) {
    std::stringstream parts(text);
    for (std::string item; std::getline(parts, item, ',');) {
      auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorKind::Binding, "binding '" + item + "' is not NAME=VALUE");
      }
      try {
        b[item.substr(0, eq)] = std::stoll(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw Error(ErrorKind::Binding, "binding '" + item + "' has a non-integer value");
      }
    }
  }
  return b;
}

std::string binding_text(const Binding& b) {
  std::string out;
  for (const auto& [k, v] : b) out += (out.empty() ? "" : ";") + k + "=" + std::to_string(v);
  return out;
}

std::vector<Compression> compression_levels(const Config& cfg, bool all_by_default) {
  std::vector<Compression> out;
  for (const auto& c : cfg.compressions) out.push_back(parse_compression(c));
  if (out.empty()) {
    if (all_by_default) return {Compression::None, Compression::Input, Compression::InputOutput};
    out.push_back(Compression::InputOutput);
  }
  return out;
}

int cmd_compile(const Config& cfg) {
  const std::string kernel = cfg.kernels.empty() ? "" : cfg.kernels.front();
  Source src = load_source(cfg, kernel);
  for (Compression c : compression_levels(cfg, false)) {
    KernelPlan plan = compile_rule(src.program, src.rule, c);
    std::cout << plan.describe();
    if (!cfg.binds.empty()) {
      Binding b = resolve_binding(plan.params, parse_binds(cfg.binds));
      std::cout << "footprint at " << binding_text(b) << ":\n" << footprint_report(plan, b).str();
    }
    if (!cfg.emit_c.empty()) {
      std::filesystem::create_directories(cfg.emit_c);
      for (const auto& [name, text] : emit_c(plan)) {
        std::ofstream out(std::filesystem::path(cfg.emit_c) / name);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + name);
        out << text;
        std::cout << "wrote " << (std::filesystem::path(cfg.emit_c) / name).string() << "\n";
      }
    }
  }
  return kExitOk;
}

template <typename T>
std::pair<bool, double> verify_run(const KernelPlan& plan, const Source& src, const Binding& b,
                                   const ExecOptions& opts, const Config& cfg) {
  auto inputs = random_inputs<T>(plan, b, cfg.seed);
  auto want = reference_execute(src.program, src.rule, inputs, b);
  DenseTensor<T> got;
  try {
    got = run_compressed(plan, src.program, inputs, b, opts);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::IndexOutOfRange && e.kind() != ErrorKind::Domain) throw;
    std::cerr << "execution aborted: " << e.what() << "\n";
    return {false, std::numeric_limits<double>::infinity()};
  }
  if (!cfg.output.empty()) {
    std::ofstream out(cfg.output);
    write_tensor(out, got);
  }
  double rel = max_relative_error(got, want);
  bool pass = std::is_floating_point_v<T> ? rel <= 1e-12 : got.data == want.data;
  return {pass, rel};
}

int cmd_run(const Config& cfg) {
  const std::string kernel = cfg.kernels.empty() ? "" : cfg.kernels.front();
  Source src = load_source(cfg, kernel);
  KernelPlan plan = compile_rule(src.program, src.rule, compression_levels(cfg, false).front());
  Binding b = resolve_binding(plan.params, parse_binds(cfg.binds));
  ExecOptions opts;
  opts.workers = cfg.workers.empty() ? 1 : cfg.workers.front();
  opts.check_hoisting = true;
  if (cfg.corrupt && !plan.inputs.empty()) opts.corrupt_tensor = plan.inputs.front();
  auto [pass, rel] = cfg.dtype == "i64" ? verify_run<std::int64_t>(plan, src, b, opts, cfg)
                                        : verify_run<double>(plan, src, b, opts, cfg);
  std::cout << "kernel=" << src.label << " binding=" << binding_text(b)
            << " compression=" << to_string(plan.compression) << " workers=" << opts.workers << "\n";
  std::cout << "VERIFY: " << (pass ? "PASS" : "FAIL") << " maxrel=" << rel << "\n";
  return pass ? kExitOk : kExitVerify;
}

std::int64_t median(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// Dense oracle cost: product of the output and reduction extents.
std::int64_t reference_points(const KernelPlan& plan, const Binding& b) {
  std::int64_t total = 0;
  for (const auto& sp : plan.summands) {
    std::int64_t box = 1;
    for (const auto& it : sp.summand.iterators) {
      std::int64_t extent = 0;
      for (std::size_t k = 0; k <= sp.summand.inputs.size() && extent == 0; ++k) {
        const Access& a = k == 0 ? sp.summand.output : sp.summand.inputs[k - 1];
        auto pos = std::find(a.indices.begin(), a.indices.end(), it);
        if (pos != a.indices.end()) {
          extent = evaluate_shape(plan.shapes.at(a.tensor), b)[static_cast<std::size_t>(pos - a.indices.begin())];
        }
      }
      box = extent > 0 && box > std::numeric_limits<std::int64_t>::max() / extent ? std::numeric_limits<std::int64_t>::max() : box * extent;
    }
    total = std::max(total, box);
  }
  return total;
}

template <typename T>
std::string bench_row(const KernelPlan& plan, const Source& src, const Binding& b, int workers,
                      const Config& cfg, bool& failed) {
  const auto rep = footprint_report(plan, b);
  std::ostringstream row;
  row << src.label << "," << binding_text(b) << "," << to_string(plan.compression) << "," << workers << ",";
  const auto lengths = plan.buffer_lengths(b);
  std::int64_t largest = 0;
  for (auto l : lengths) largest = std::max(largest, l);
  std::string runtime = "-1", verify = "SKIP";
  if (!cfg.footprint_only && largest <= cfg.max_elements) {
    ExecOptions opts;
    opts.workers = workers;
    auto inputs = random_inputs<T>(plan, b, cfg.seed);
    auto bufs = prepare_buffers(plan, inputs, b);
    execute(plan, bufs, b, opts);
    std::vector<std::int64_t> times;
    for (int r = 0; r < 3; ++r) {
      auto t0 = std::chrono::steady_clock::now();
      execute(plan, bufs, b, opts);
      auto t1 = std::chrono::steady_clock::now();
      times.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    }
    runtime = std::to_string(median(times));
    if (reference_points(plan, b) <= cfg.max_elements) {
      auto got = gather_output(plan, src.program, bufs, b);
      auto want = reference_execute(src.program, src.rule, inputs, b);
      double rel = max_relative_error(got, want);
      bool pass = std::is_floating_point_v<T> ? rel <= 1e-12 : got.data == want.data;
      verify = pass ? "PASS" : "FAIL";
      failed = !pass;
    }
  }
  row << runtime << "," << rep.dense_total << "," << rep.compressed_total << "," << rep.rate().to_double()
      << "," << verify;
  return row.str();
}

int cmd_bench(const Config& cfg) {
  std::vector<std::string> kernels = cfg.kernels;
  if (kernels.empty() && cfg.stur.empty()) {
    for (const auto& k : builtin_kernels()) {
      if (k.evaluation) kernels.push_back(k.name);
    }
  }
  if (kernels.empty()) kernels.push_back("");
  std::vector<int> workers = cfg.workers.empty() ? std::vector<int>{1} : cfg.workers;
  Binding given = parse_binds(cfg.binds.empty() ? std::vector<std::string>{"n=64"} : cfg.binds);

  std::ofstream file;
  if (!cfg.csv.empty()) {
    file.open(cfg.csv);
    if (!file) throw Error(ErrorKind::Io, "cannot write '" + cfg.csv + "'");
  }
  std::ostream& out = cfg.csv.empty() ? std::cout : file;
  out << "kernel,binding,compression,workers,runtime_ns,elements_dense,elements_compressed,rate,verify\n";
  for (const auto& kernel : kernels) {
    Source src = load_source(cfg, kernel);
    for (Compression c : compression_levels(cfg, true)) {
      KernelPlan plan = compile_rule(src.program, src.rule, c);
      Binding b = resolve_binding(plan.params, given);
      for (int w : workers) {
        bool failed = false;
        std::string row = cfg.dtype == "i64" ? bench_row<std::int64_t>(plan, src, b, w, cfg, failed)
                                             : bench_row<double>(plan, src, b, w, cfg, failed);
        out << row << "\n";
        out.flush();
        if (failed) {
          std::cerr << "verification failed for " << src.label << "; aborting\n";
          return kExitVerify;
        }
      }
    }
  }
  return kExitOk;
}

void add_common(CLI::App* app, Config& cfg, bool many) {
  auto* kernel = app->add_option("--kernel", cfg.kernels, "Builtin kernel name");
  if (!many) kernel->expected(1);
  auto* stur = app->add_option("--stur", cfg.stur, "STUR source file");
  kernel->excludes(stur);
  app->add_option("--rule", cfg.rule, "Rule to compile (default: first rule)");
  app->add_option("--bind", cfg.binds, "Symbol binding NAME=VALUE (repeatable; n=V sets every extent)");
  app->add_option("--dtype", cfg.dtype, "Element type")->check(CLI::IsMember({"f64", "i64"}));
  app->add_option("--seed", cfg.seed, "Random input seed");
  app->add_option("--workers", cfg.workers, "Worker threads (repeatable for bench)");
  app->add_option("--compression", cfg.compressions, "none, input or input+output")
      ->check(CLI::IsMember({"none", "input", "input+output", "full"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polypack: compressed layouts and loop nests for structured tensor kernels"};
  app.require_subcommand(1);
  Config cfg;

  auto* compile = app.add_subcommand("compile", "Print index polynomials, buffers and loop nests");
  add_common(compile, cfg, false);
  compile->add_option("--emit-c", cfg.emit_c, "Directory for generated C files");

  auto* run = app.add_subcommand("run", "Execute the compressed plan and verify against the dense oracle");
  add_common(run, cfg, false);
  run->add_option("--output", cfg.output, "Write the output tensor to a file");
  run->add_flag("--corrupt-index", cfg.corrupt, "Shift every index of the first input (test hook)")->group("");

  auto* bench = app.add_subcommand("bench", "Time kernels and report footprints as CSV");
  add_common(bench, cfg, true);
  bench->add_option("--csv", cfg.csv, "CSV output file (default: stdout)");
  bench->add_flag("--footprint-only", cfg.footprint_only, "Skip execution; report element counts");
  bench->add_option("--max-elements", cfg.max_elements, "Largest buffer or oracle box to execute");

  auto* list = app.add_subcommand("list", "List builtin kernels");

  CLI11_PARSE(app, argc, argv);
  try {
    if (list->parsed()) {
      for (const auto& k : builtin_kernels()) std::cout << k.name << "\t" << k.family << "\t" << k.structure << "\n";
      return kExitOk;
    }
    if (!bench->parsed() && cfg.kernels.empty() && cfg.stur.empty()) {
      std::cerr << "error: one of --kernel or --stur is required\n";
      return kExitCompile;
    }
    if (compile->parsed()) return cmd_compile(cfg);
    if (run->parsed()) return cmd_run(cfg);
    return cmd_bench(cfg);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return kExitCompile;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompile;
  }
}
