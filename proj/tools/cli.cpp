#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <system_error>

#include "CLI11.hpp"
#include "dumbbell/analysis.hpp"
#include "dumbbell/capture_sink.hpp"
#include "dumbbell/delay_schedule.hpp"
#include "dumbbell/emulator.hpp"
#include "dumbbell/layout.hpp"
#include "dumbbell/metadata.hpp"
#include "dumbbell/reporting.hpp"
#include "dumbbell/run_params.hpp"
#include "dumbbell/schemes.hpp"
#include "dumbbell/svg_plot.hpp"

namespace fs = std::filesystem;

namespace dumbbell::cli {

namespace {

constexpr const char* kDefaultDumps = "dumps";
constexpr const char* kDefaultData = "graphs/data";
constexpr const char* kDefaultGraphs = "graphs";
constexpr const char* kDefaultLayout = "layout.yml";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// ---------------------------------------------------------------- run

struct RunOptions {
  std::vector<std::string> delays;  // base delta step [jitter]
  std::optional<std::string> dir;
  std::string layout = kDefaultLayout;
  double rate = 100.0;
  std::int64_t runtime = 30;
  std::string max_delay = "100000000";
  std::optional<std::uint64_t> seed;
  std::optional<double> buffer;
  std::optional<std::uint32_t> q1, q2, q;
  std::optional<std::string> from_metadata;
  bool trace = false;
  bool no_delayed_ack = false;
  std::optional<double> capture_loss;
  std::optional<std::string> delay_lag;
};

void add_run(CLI::App& app, RunOptions& o) {
  auto* run = app.add_subcommand(
      "run",
      "Tests congestion control schemes by running flows of different schemes in an emulated dumbbell topology "
      "for runtime seconds. Groups of flows come from the layout file. The central link has a rate, a constant "
      "or variable delay with optional jitter, and a queue size at each end. Captures of both hosts of every "
      "flow and metadata.json are written to the output directory.");
  run->add_option("delays", o.delays,
                  "base delta step [jitter]: initial central delay, the period after which the delay changes by "
                  "step, the step, and optional jitter. Formats: N (milliseconds assumed), Nus, Nms, Ns. For a "
                  "constant delay set delta above the runtime.")
      ->expected(0, 4);
  run->add_option("-d,--dir", o.dir, "Output directory, default is \"dumps\"");
  run->add_option("-l,--layout", o.layout,
                  "Layout file with groups of flows; created with example settings when missing "
                  "(default \"layout.yml\")");
  run->add_option("-r,--rate", o.rate, "Rate of the central link in Mbit/s, 0 leaves it unshaped (default 100.0)");
  run->add_option("-t,--runtime", o.runtime, "Runtime in seconds, 1 to 60 (default 30)");
  run->add_option("-m,--max-delay", o.max_delay,
                  "Max delay and jitter in microseconds (default 100000000, i.e. 100 s); Nus/Nms/Ns also accepted");
  run->add_option("-s,--seed", o.seed, "Seed of the variable delay, default is the current UNIX time");
  run->add_option("-b,--buffer", o.buffer, "Capture buffer size in MiB; accepted for compatibility and ignored");
  run->add_option("--first-queue", o.q1, "Queue size of the left router's central-link interface (-q1)");
  run->add_option("--second-queue", o.q2, "Queue size of the right router's central-link interface (-q2)");
  run->add_option("-q,--queues", o.q, "Queue size of both central-link interfaces, same as -q1 N -q2 N");
  run->add_option("--from-metadata", o.from_metadata,
                  "Rerun the experiment described by a metadata.json file; -d may redirect the output");
  run->add_flag("--trace", o.trace, "Also write trace-<#>-<scheme>.log files with congestion-control state");
  run->add_flag("--no-delayed-ack", o.no_delayed_ack, "Receivers acknowledge every data packet at once");
  run->add_option("--capture-loss", o.capture_loss, "Probability of a sender capture missing a data packet");
  run->add_option("--delay-lag", o.delay_lag, "Time for one end of the central link to take a new delay (4ms)");
}

Metadata prepare_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  Metadata m;
  if (o.from_metadata) {
    if (!o.delays.empty()) throw ConfigError("--from-metadata takes no positional arguments");
    m = load_metadata(*o.from_metadata);
    if (o.dir) m.params.output_dir = *o.dir;
  } else {
    if (o.delays.size() < 3) throw ConfigError("expected positional arguments: base delta step [jitter]");
    RunParams& p = m.params;
    p.base = parse_duration(o.delays[0]);
    p.delta = parse_duration(o.delays[1]);
    p.step = parse_duration(o.delays[2]);
    if (o.delays.size() == 4) p.jitter = parse_duration(o.delays[3]);
    if (o.runtime < 1 || o.runtime > kMaxRuntimeSeconds) {
      throw ConfigError("runtime must be in [1, 60] seconds, got " + std::to_string(o.runtime));
    }
    p.runtime = static_cast<std::uint32_t>(o.runtime);
    p.central_rate_mbps = o.rate;
    p.max_delay = parse_duration(o.max_delay, BareUnit::microseconds);
    p.seed = resolve_seed(o.seed);
    if (o.q) p.q1 = p.q2 = *o.q;
    if (o.q1) p.q1 = *o.q1;
    if (o.q2) p.q2 = *o.q2;
    p.output_dir = o.dir.value_or(kDefaultDumps);

    const fs::path layout{o.layout};
    if (!fs::exists(layout)) {
      write_file(layout, default_layout(p.runtime));
      out << "Layout file " << layout.string() << " did not exist, created it with the default layout\n";
    }
    m.groups = parse_layout(read_file(layout));
  }
  if (o.buffer) err << "warning: -b/--buffer has no effect in the emulator and is ignored\n";
  RunParams& p = m.params;
  if (o.trace) p.sim.trace = true;
  if (o.no_delayed_ack) p.sim.delayed_ack = false;
  if (o.capture_loss) p.sim.capture_loss = *o.capture_loss;
  if (o.delay_lag) p.sim.delay_change_lag = parse_duration(*o.delay_lag);
  validate(p, m.groups);
  m.groups = sorted_by_start(m.groups);
  return m;
}

int do_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  const Metadata m = prepare_run(o, out, err);
  const RunParams& p = m.params;

  out << "Testing:\n";
  out << "Total number of flows is " << total_flows(m.groups) << "\n";
  out << "Flows have been sorted by their start\n";
  out << "Creating the dumbbell topology...\n";
  Topology topology = build_topology(m.groups, p);
  out << "Setting rates, delays and queue sizes at the topology's interfaces...\n";
  const VariableDelaySchedule schedule = generate_delay_schedule(p);
  save_metadata(p, m.groups);
  out << "Starting packet recordings at hosts...\n";
  PcapDirectorySink sink(p.output_dir);
  out << "Starting servers...\n";
  out << "Starting clients and optionally varying delay...\n";
  const RunReport report = run(topology, schedule, p, &sink);
  out << "Stopping flows and closing recordings...\n";
  for (const auto& trace : report.traces) {
    std::ofstream f(fs::path(p.output_dir) / trace_file_name(trace.flow_index(), trace.scheme()), std::ios::binary);
    trace.write_jsonl(f);
    if (!f) throw std::runtime_error("cannot write trace of flow " + std::to_string(trace.flow_index()));
  }
  out << "SUCCESS\n";
  out << "Done.\n";
  return 0;
}

// ------------------------------------------------------------ analyze

struct AnalyzeOptions {
  std::string dir = kDefaultDumps;
  std::string output = kDefaultData;
};

void add_analyze(CLI::App& app, AnalyzeOptions& o) {
  auto* cmd = app.add_subcommand("analyze", "Extracts data from the captures of a run into data-<#>.log files.");
  cmd->add_option("-d,--dir", o.dir, "Folder with input captures, default is \"dumps\"");
  cmd->add_option("-o,--output-dir", o.output, "Folder with output files, default is \"graphs/data\"");
}

int do_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  analyze_directory(
      o.dir, o.output, [&](const FlowSpec& flow, const FlowAnalysis& result) { out << format_flow_summary(flow, result); },
      [&](double fraction) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
        char line[64];
        std::snprintf(line, sizeof line, "\rProgress: %3.0f%%, elapsed %.1f s", fraction * 100.0, elapsed.count());
        err << line << std::flush;
      });
  err << '\n';
  out << "SUCCESS\n";
  return 0;
}

// --------------------------------------------------------------- plot

struct PlotOptions {
  std::string dir = kDefaultData;
  std::string output = kDefaultGraphs;
  bool per_flow = false;
  bool total = false;
  std::optional<std::string> subset;
  double interval = kDefaultInterval;
  std::optional<std::string> colors;
  std::optional<std::string> jain_color;
};

void add_plot(CLI::App& app, PlotOptions& o) {
  auto* cmd = app.add_subcommand(
      "plot",
      "Makes graphs and stats over the data logs: per-flow (-f), total (-t), per-subset (-s). Each type yields "
      "average throughput, average Jain's index, average one-way delay and per-packet one-way delay plots plus a "
      "stats file.");
  cmd->add_option("-d,--dir", o.dir, "Folder with input data files, default is \"graphs/data\"");
  cmd->add_option("-o,--output-dir", o.output, "Folder with output graphs and stats, default is \"graphs\"");
  cmd->add_flag("-f,--per-flow", o.per_flow, "One curve per flow");
  cmd->add_flag("-t,--total", o.total, "One curve for all flows");
  cmd->add_option("-s,--per-subset", o.subset,
                  "\"FIELD1 FIELD2...\": one curve per subset of flows with equal values of the fields; allowed "
                  "fields: scheme, direction");
  cmd->add_option("-i,--interval", o.interval, "Aggregation interval of the average plots in seconds (0.5)");
  cmd->add_option("-c,--colors", o.colors, "\"COLOR1 COLOR2...\": color cycle of the curves");
  cmd->add_option("-j,--jains-index-color", o.jain_color,
                  "Color of the Jain's index curve, default is the first color of the cycle");
}

int do_plot(const PlotOptions& o, std::ostream& out, std::ostream& err) {
  if (!o.per_flow && !o.total && !o.subset) {
    throw ConfigError("choose at least one type of graphs: -f/--per-flow, -t/--total or -s/--per-subset");
  }
  if (!(o.interval > 0.0) || !std::isfinite(o.interval)) throw ConfigError("the interval must be positive");

  std::vector<std::pair<ReportType, std::vector<SubsetField>>> types;
  if (o.per_flow) types.emplace_back(ReportType::per_flow, std::vector<SubsetField>{});
  if (o.total) types.emplace_back(ReportType::total, std::vector<SubsetField>{});
  if (o.subset) types.emplace_back(ReportType::per_subset, parse_subset_fields(*o.subset));

  ReportOptions options;
  options.interval = o.interval;
  if (o.colors) options.colors = parse_color_cycle(*o.colors);
  options.jain_color = o.jain_color;

  out << "Loading data of the curves to make average plots and stats...\n";
  const std::vector<LoadedFlow> flows = load_flow_data(o.dir);
  for (const auto& [type, fields] : types) {
    const auto curves = build_curves(flows, type, fields);
    const auto result = emit_reports(curves, report_type_name(type, fields), o.output, options,
                                     [&](std::string_view line) { out << line << '\n' << std::flush; });
    for (const auto& notice : result.notices) err << "notice: " << notice << '\n';
  }
  out << "SUCCESS\n";
  return 0;
}

// -------------------------------------------------------------- clean

struct CleanOptions {
  bool all = false, pcaps = false, data = false, graphs = false;
  bool senders = false, receivers = false, mutual = false;
  std::string folder1 = kDefaultDumps;
  std::string folder2 = kDefaultData;
  std::string folder3 = kDefaultGraphs;
};

void add_clean(CLI::App& app, CleanOptions& o) {
  auto* cmd = app.add_subcommand(
      "clean",
      "Cleans the three output directories. Deletes only pcap/json/svg/png/log files and never touches "
      "subdirectories. A chosen directory left completely empty is deleted as well.");
  cmd->add_flag("-a,--all", o.all, "Delete all files in the three directories, same as -pdg");
  cmd->add_flag("-p,--pcap,--pcaps", o.pcaps, "Delete files in the directory with captures");
  cmd->add_flag("-d,--data", o.data, "Delete files in the directory with data files");
  cmd->add_flag("-g,--graph,--graphs", o.graphs, "Delete files in the directory with graphs");
  cmd->add_flag("-s,--senders,--sender", o.senders, "Among chosen files, delete those belonging only to senders");
  cmd->add_flag("-r,--receivers,--receiver", o.receivers,
                "Among chosen files, delete those belonging only to receivers");
  cmd->add_flag("-m,--mutual", o.mutual, "Among chosen files, delete those common to senders and receivers");
  cmd->add_option("--folder1", o.folder1, "Directory with captures (-f1), default is \"dumps\"");
  cmd->add_option("--folder2", o.folder2, "Directory with data files (-f2), default is \"graphs/data\"");
  cmd->add_option("--folder3", o.folder3, "Directory with graphs (-f3), default is \"graphs\"");
}

int do_clean(const CleanOptions& o, std::ostream& out) {
  std::vector<fs::path> dirs;
  if (o.all || o.pcaps) dirs.emplace_back(o.folder1);
  if (o.all || o.data) dirs.emplace_back(o.folder2);
  if (o.all || o.graphs) dirs.emplace_back(o.folder3);
  if (dirs.empty()) {
    out << "Nothing to clean: choose directories with -p, -d, -g or -a\n";
    return 0;
  }
  const bool any_role = o.senders || o.receivers || o.mutual;
  auto wanted = [&](FileRole role) {
    if (!any_role) return true;
    switch (role) {
      case FileRole::sender:
        return o.senders;
      case FileRole::receiver:
        return o.receivers;
      case FileRole::mutual:
        return o.mutual;
    }
    return false;
  };

  for (const auto& dir : dirs) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) continue;
    std::vector<fs::path> doomed;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      if (is_cleanable(entry.path()) && wanted(classify_file(entry.path()))) doomed.push_back(entry.path());
    }
    std::sort(doomed.begin(), doomed.end());
    for (const auto& file : doomed) fs::remove(file);
    if (!doomed.empty()) {
      out << "Deleted " << doomed.size() << (doomed.size() == 1 ? " file" : " files") << " in " << dir.string()
          << '\n';
      if (fs::is_empty(dir)) {
        fs::remove(dir);
        out << "Deleted the empty directory " << dir.string() << '\n';
      }
    }
  }
  return 0;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::vector<std::string> normalize_arguments(std::vector<std::string> args) {
  static const std::map<std::string, std::string> kLong{{"-q1", "--first-queue"},
                                                        {"-q2", "--second-queue"},
                                                        {"-f1", "--folder1"},
                                                        {"-f2", "--folder2"},
                                                        {"-f3", "--folder3"}};
  for (auto& a : args) {
    if (a == "--") break;
    const auto eq = a.find('=');
    const auto it = kLong.find(a.substr(0, eq));
    if (it != kLong.end()) a = it->second + (eq == std::string::npos ? "" : a.substr(eq));
  }
  return args;
}

bool is_cleanable(const fs::path& file) {
  static const std::vector<std::string> kExt{".pcap", ".json", ".svg", ".png", ".log"};
  return std::find(kExt.begin(), kExt.end(), file.extension().string()) != kExt.end();
}

FileRole classify_file(const fs::path& file) {
  const std::string name = file.filename().string();
  if (ends_with(name, "-sender.pcap")) return FileRole::sender;
  if (ends_with(name, "-receiver.pcap")) return FileRole::receiver;
  if (name.rfind("trace-", 0) == 0 && ends_with(name, ".log")) return FileRole::sender;
  return FileRole::mutual;
}

int main(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dumbbell-topology congestion control emulator: run experiments, analyze captures, plot results."};
  app.name("dumbbell");
  app.require_subcommand(1);

  RunOptions run_options;
  AnalyzeOptions analyze_options;
  PlotOptions plot_options;
  CleanOptions clean_options;
  add_run(app, run_options);
  add_analyze(app, analyze_options);
  add_plot(app, plot_options);
  add_clean(app, clean_options);

  std::vector<std::string> args = normalize_arguments(raw_args);
  std::reverse(args.begin(), args.end());  // CLI11 consumes the vector from the back
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (app.got_subcommand("run")) return do_run(run_options, out, err);
    if (app.got_subcommand("analyze")) return do_analyze(analyze_options, out, err);
    if (app.got_subcommand("plot")) return do_plot(plot_options, out, err);
    if (app.got_subcommand("clean")) return do_clean(clean_options, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace dumbbell::cli
