// Command-line front end. Every command reads digit sets in the JSON schema
// {"n", "m", "digits"} and writes JSON (or SVG / CSV) to stdout or --out.
//
// Exit codes: 0 success, 1 acceptance failure (reproduce), 2 usage or invalid
// input, 3 resource cap, 4 I/O.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "bmcarpet/bmcarpet.hpp"
#include "bmcarpet/verify/acceptance.hpp"
#include "json.hpp"

namespace {

using namespace bmcarpet;
namespace fs = std::filesystem;

constexpr int kExitAcceptance = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCap = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string digitset;
  std::string a, b;
  std::string out;
  std::string corpus = "corpus";
  std::string delta;
  std::string delta_scale = "2/3";
  std::string format = "json";
  int k = 1;
  int level = 1;
  int x_level = 0;
  int k_min = 1;
  int k_max = 0;
  int level_offset = 1;
  long long max_cells = kDefaultMaxCells;
  long long max_components = kDefaultMaxComponents;
  long long max_runs = HBracketOptions{}.max_runs;
  bool tilde = false;
  bool list = false;
  std::optional<int> only;
};

// Writes through a sibling temporary and a rename so readers never see a
// partial file.
void emit(const Options& o, const std::string& text) {
  if (o.out.empty() || o.out == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("cannot write to standard output");
    return;
  }
  const fs::path target(o.out);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string());
    f << text;
    f.close();
    if (!f) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename to " + target.string() + ": " + ec.message());
}

void emit_json(const Options& o, const char* command, nlohmann::json payload) {
  payload["command"] = command;
  payload["version"] = kVersion;
  payload["schema_version"] = kSchemaVersion;
  emit(o, payload.dump(2) + "\n");
}

StreamLimits limits(const Options& o) { return {o.max_cells, -1}; }

int k_max_or(const Options& o, int fallback) { return o.k_max > 0 ? o.k_max : fallback; }

void cmd_classify(const Options& o) {
  const DigitSet ds = load_digit_set(o.digitset);
  const Classification cls = classify(ds);
  nlohmann::json j = to_json(cls);
  j["digit_set"] = to_json(ds);
  j["box_dimension"] = box_dimension(ds);
  j["hausdorff_dimension"] = hausdorff_dimension(ds);
  emit_json(o, "classify", std::move(j));
}

void cmd_components(const Options& o) {
  const DigitSet ds = load_digit_set(o.digitset);
  const ComponentSummary s =
      count_components(ds, o.k, o.tilde ? Domain::Tilde : Domain::Plain, limits(o));
  emit_json(o, "components", to_json(s, o.list));
}

void cmd_csc(const Options& o) {
  const DigitSet ds = load_digit_set(o.digitset);
  const CscSearch s = find_csc_certificate(ds, k_max_or(o, kDefaultCscLevels), limits(o));
  nlohmann::json j = to_json(s);
  if (s.certificate) j["verified"] = verify_csc_certificate(ds, *s.certificate);
  emit_json(o, "csc", std::move(j));
}

void cmd_cardinality(const Options& o) {
  const DigitSet ds = load_digit_set(o.digitset);
  const CardinalityVerdict v =
      infer_component_cardinality(ds, classify(ds), k_max_or(o, kDefaultCscLevels), limits(o));
  emit_json(o, "cardinality", to_json(v));
}

void cmd_gaps(const Options& o) {
  const DigitSet ds = load_digit_set(o.digitset);
  emit_json(o, "gaps", to_json(component_gap_sequence(ds, o.k, o.max_components, limits(o))));
}

void cmd_hbracket(const Options& o) {
  const DigitSet ds = load_digit_set(o.digitset);
  const HBracket b = h_bracket(ds, o.level, parse_rational(o.delta), {o.max_runs}, o.x_level);
  emit_json(o, "hbracket", to_json(b));
}

void cmd_exponent(const Options& o) {
  const DigitSet ds = load_digit_set(o.digitset);
  ExponentPlan plan;
  plan.k_min = o.k_min;
  plan.k_max = k_max_or(o, plan.k_max);
  plan.level_offset = o.level_offset;
  plan.delta_scale = parse_rational(o.delta_scale);
  plan.bracket.max_runs = o.max_runs;
  const auto samples = exponent_samples(ds, plan);
  if (o.format == "csv") {
    std::ostringstream os;
    os << "delta_num,delta_den,h_low,h_high,L\n";
    for (const HBracket& b : samples)
      os << numerator(b.delta) << "," << denominator(b.delta) << "," << b.h_low << ","
         << b.h_high << "," << b.level << "\n";
    emit(o, os.str());
    return;
  }
  const Classification cls = classify(ds);
  const CardinalityVerdict card = infer_component_cardinality(ds, cls);
  emit_json(o, "exponent", to_json(fit_h_exponent(samples, predicted_exponent(cls, ds, card.verdict))));
}

void cmd_compare(const Options& o) {
  const DigitSet a = load_digit_set(o.a);
  const DigitSet b = load_digit_set(o.b);
  emit_json(o, "compare", to_json(lipschitz_report(a, b, k_max_or(o, kDefaultCscLevels), limits(o))));
}

void cmd_render(const Options& o) {
  const DigitSet ds = load_digit_set(o.digitset);
  emit(o, render_svg(ds, o.k, o.max_cells));
}

void cmd_cells(const Options& o) {
  const DigitSet ds = load_digit_set(o.digitset);
  emit(o, cells_csv(ds, o.k, o.max_cells));
}

int cmd_reproduce(const Options& o) {
  std::vector<verify::CriterionResult> results;
  for (std::size_t i = 0; i < verify::criteria().size(); ++i) {
    if (o.only && static_cast<int>(i + 1) != *o.only) continue;
    results.push_back(verify::run_criterion(i, o.corpus));
    const auto& r = results.back();
    // Timings vary run to run, so they go to stderr only.
    std::cerr << "criterion " << r.id << ": " << r.seconds << " s\n";
  }
  bool all = true;
  for (const auto& r : results) all = all && r.passed;
  if (o.format == "table") {
    std::ostringstream os;
    for (const auto& r : results) {
      os << "[" << (r.passed ? "PASS" : "FAIL") << "] " << r.id << ". " << r.name << "\n"
         << "    measured:  " << r.measured << "\n"
         << "    expected:  " << r.expected << "\n"
         << "    tolerance: " << r.tolerance << "\n";
      for (const auto& f : r.failures) os << "    failure:   " << f << "\n";
    }
    emit(o, os.str());
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : results) rows.push_back(verify::to_json(r));
    emit_json(o, "reproduce", {{"criteria", std::move(rows)}, {"all_passed", all}});
  }
  return all ? 0 : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bedford-McMullen carpet toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1, 1);
  Options o;

  auto digitset = [&](CLI::App* sub) {
    sub->add_option("--digitset", o.digitset, "digit-set JSON file")->required();
  };
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "output file (default stdout)");
    sub->add_option("--max-cells", o.max_cells, "occupied-cell cap")
        ->check(CLI::PositiveNumber);
  };

  auto* classify_cmd = app.add_subcommand("classify", "combinatorial classification");
  digitset(classify_cmd);
  common(classify_cmd);

  auto* components = app.add_subcommand("components", "connected components of Q_k");
  digitset(components);
  common(components);
  components->add_option("--k", o.k, "level")->required()->check(CLI::PositiveNumber);
  components->add_flag("--tilde", o.tilde, "label the 3x3 tiling instead of Q_k");
  components->add_flag("--list", o.list, "list boundary-touching components");

  auto* csc = app.add_subcommand("csc", "search for a component separation certificate");
  digitset(csc);
  common(csc);
  csc->add_option("--kmax", o.k_max, "highest level to search")->check(CLI::PositiveNumber);

  auto* cardinality = app.add_subcommand("cardinality", "finite or infinite components");
  digitset(cardinality);
  common(cardinality);
  cardinality->add_option("--kmax", o.k_max, "highest level to search")
      ->check(CLI::PositiveNumber);

  auto* gaps = app.add_subcommand("gaps", "exact gap sequence of Q_k");
  digitset(gaps);
  common(gaps);
  gaps->add_option("--k", o.k, "level")->required()->check(CLI::PositiveNumber);
  gaps->add_option("--max-components", o.max_components, "component cap")
      ->check(CLI::PositiveNumber);

  auto* hbracket = app.add_subcommand("hbracket", "two-sided bounds on h(delta)");
  digitset(hbracket);
  common(hbracket);
  hbracket->add_option("--level", o.level, "row level L")->required()->check(CLI::PositiveNumber);
  hbracket->add_option("--delta", o.delta, "threshold p/q")->required();
  hbracket->add_option("--x-level", o.x_level, "column level (default L)")
      ->check(CLI::PositiveNumber);
  hbracket->add_option("--max-runs", o.max_runs, "run budget")->check(CLI::PositiveNumber);

  auto* exponent = app.add_subcommand("exponent", "fit the h(delta) exponent");
  digitset(exponent);
  common(exponent);
  exponent->add_option("--kmin", o.k_min, "first k")->check(CLI::PositiveNumber);
  exponent->add_option("--kmax", o.k_max, "last k")->check(CLI::PositiveNumber);
  exponent->add_option("--level-offset", o.level_offset, "column level minus k")
      ->check(CLI::PositiveNumber);
  exponent->add_option("--delta-scale", o.delta_scale, "delta = scale * n^-k, as p/q");
  exponent->add_option("--max-runs", o.max_runs, "run budget per bracket")
      ->check(CLI::PositiveNumber);
  exponent->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* compare = app.add_subcommand("compare", "gap comparability and Lipschitz verdict");
  compare->add_option("--a", o.a, "first digit-set file")->required();
  compare->add_option("--b", o.b, "second digit-set file")->required();
  common(compare);
  compare->add_option("--kmax", o.k_max, "CSC search depth")->check(CLI::PositiveNumber);

  auto* render = app.add_subcommand("render", "SVG drawing of Q_k");
  digitset(render);
  render->add_option("--out", o.out, "output file (default stdout)");
  render->add_option("--k", o.k, "level")->required()->check(CLI::PositiveNumber);
  render->add_option("--max-cells", o.max_cells, "cell cap")->check(CLI::PositiveNumber);

  auto* cells = app.add_subcommand("cells", "CSV list of the cells of Q_k");
  digitset(cells);
  cells->add_option("--out", o.out, "output file (default stdout)");
  cells->add_option("--k", o.k, "level")->required()->check(CLI::PositiveNumber);
  cells->add_option("--max-cells", o.max_cells, "cell cap")->check(CLI::PositiveNumber);

  auto* reproduce = app.add_subcommand("reproduce", "run the acceptance suite");
  reproduce->add_option("--corpus", o.corpus, "corpus directory");
  reproduce->add_option("--out", o.out, "output file (default stdout)");
  reproduce->add_option("--format", o.format, "json or table")
      ->check(CLI::IsMember({"json", "table"}));
  reproduce->add_option("--only", o.only, "run a single criterion")->check(CLI::Range(1, 8));

  // Render/cells default to the smaller render cap.
  render->preparse_callback([&](std::size_t) { o.max_cells = kDefaultRenderCells; });
  cells->preparse_callback([&](std::size_t) { o.max_cells = kDefaultRenderCells; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*classify_cmd) cmd_classify(o);
    else if (*components) cmd_components(o);
    else if (*csc) cmd_csc(o);
    else if (*cardinality) cmd_cardinality(o);
    else if (*gaps) cmd_gaps(o);
    else if (*hbracket) cmd_hbracket(o);
    else if (*exponent) cmd_exponent(o);
    else if (*compare) cmd_compare(o);
    else if (*render) cmd_render(o);
    else if (*cells) cmd_cells(o);
    else if (*reproduce) return cmd_reproduce(o);
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return kExitCap;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
