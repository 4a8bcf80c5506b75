#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "flatflow/balance.hpp"
#include "flatflow/constants.hpp"
#include "flatflow/error.hpp"
#include "flatflow/flow.hpp"
#include "flatflow/interval_union.hpp"
#include "flatflow/parallel.hpp"
#include "flatflow/projection.hpp"
#include "flatflow/saddle.hpp"
#include "flatflow/spreading.hpp"
#include "flatflow/surface.hpp"
#include "flatflow/surface_io.hpp"
#include "flatflow/text.hpp"

namespace flatflow::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// JSON scalars and arrays as command-line tokens.
void append_tokens(const std::string& key, const nlohmann::json& v, std::vector<std::string>& out) {
  const std::string flag = "--" + key;
  if (v.is_boolean()) {
    if (v.get<bool>()) out.push_back(flag);
  } else if (v.is_array()) {
    for (const auto& e : v) append_tokens(key, e, out);
  } else if (v.is_string()) {
    out.push_back(flag);
    out.push_back(v.get<std::string>());
  } else if (v.is_number() || v.is_null()) {
    if (v.is_null()) return;
    out.push_back(flag);
    out.push_back(v.dump());
  }
}

struct Splice {
  std::vector<std::string> args;
  std::string config_path;
};

const std::vector<std::string> kCommands = {"surface", "trace",  "hitting",   "iet",     "saddle",      "omega",
                                            "good",    "balance", "constants", "spread", "discrepancy"};
const std::vector<std::string> kSurfaceCommands = {"validate", "unfold", "normalize", "torus"};

bool is_command(const std::string& s, const std::vector<std::string>& list) {
  return std::find(list.begin(), list.end(), s) != list.end();
}

// Inserts values from a JSON config file right after the subcommand path, so
// flags given on the command line (which come later) take precedence.
Splice splice_config(const std::vector<std::string>& args) {
  Splice sp;
  std::size_t cmd_at = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if ((args[i] == "--config" || args[i] == "--threads") && i + 1 < args.size()) {
      if (args[i] == "--config") sp.config_path = args[i + 1];
      ++i;
      continue;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      sp.config_path = args[i].substr(9);
      continue;
    }
    if (is_command(args[i], kCommands)) {
      cmd_at = i;
      break;
    }
  }
  if (sp.config_path.empty()) {
    sp.args = args;
    return sp;
  }
  const nlohmann::json cfg = nlohmann::json::parse(read_text_file(sp.config_path));
  if (!cfg.is_object()) throw Error(ErrorCode::Parse, "config must be a JSON object");
  std::vector<std::string> path;
  std::size_t insert_at = cmd_at;
  if (cmd_at < args.size()) {
    path.push_back(args[cmd_at]);
    insert_at = cmd_at + 1;
    if (args[cmd_at] == "surface" && insert_at < args.size() && is_command(args[insert_at], kSurfaceCommands))
      path.push_back(args[insert_at++]);
  } else if (cfg.contains("command")) {
    const auto& c = cfg["command"];
    if (c.is_string()) path.push_back(c.get<std::string>());
    else
      for (const auto& e : c) path.push_back(e.get<std::string>());
  }
  std::vector<std::string> extra;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command" || value.is_object()) continue;
    append_tokens(key, value, extra);
  }
  const nlohmann::json* section = &cfg;
  for (const std::string& p : path) {
    if (!section->contains(p) || !(*section)[p].is_object()) {
      section = nullptr;
      break;
    }
    section = &(*section)[p];
    for (const auto& [key, value] : section->items())
      if (!value.is_object()) append_tokens(key, value, extra);
  }
  sp.args.assign(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(std::min(insert_at, args.size())));
  if (cmd_at >= args.size()) sp.args.insert(sp.args.end(), path.begin(), path.end());
  sp.args.insert(sp.args.end(), extra.begin(), extra.end());
  if (insert_at < args.size()) sp.args.insert(sp.args.end(), args.begin() + static_cast<std::ptrdiff_t>(insert_at), args.end());
  return sp;
}

std::vector<double> read_points(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<double> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    try {
      pts.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, "bad number in points file: " + line);
    }
  }
  return pts;
}

struct Orbit {
  int face = 0;
  std::optional<double> x, y;
  double theta = 0.7;
  std::size_t M = 1000;

  void add(CLI::App* app, bool with_count) {
    app->add_option("--face", face, "Start face");
    app->add_option("--x", x, "Start x in face chart (default: face centroid)");
    app->add_option("--y", y, "Start y in face chart");
    app->add_option("--theta", theta, "Flow direction in radians");
    if (with_count) app->add_option("--M", M, "Number of edge crossings")->check(CLI::PositiveNumber);
  }
  DirectedPoint start(const TranslationSurface& s) const {
    if (face < 0 || face >= s.face_count()) throw Error(ErrorCode::InvalidArgument, "start face out of range");
    Vec2 c{0.0, 0.0};
    for (Vec2 v : s.face(face).vertices) c = c + v;
    c = (1.0 / static_cast<double>(s.face(face).size())) * c;
    return {face, {x.value_or(c.x), y.value_or(c.y)}, theta};
  }
};

nlohmann::json surface_summary(const TranslationSurface& s) {
  nlohmann::json sing = nlohmann::json::array();
  for (const Singularity& g : s.singularities())
    sing.push_back({{"cone_angle", g.cone_angle}, {"order", g.order}, {"corners", g.corners.size()}});
  return {{"faces", s.face_count()},
          {"edge_pairs", s.edges().size()},
          {"genus", s.genus()},
          {"area", s.area()},
          {"singularities", sing},
          {"inscribed_diameter", s.inscribed_diameter()},
          {"total_edge_length", s.total_edge_length()},
          {"max_face_diameter", s.max_face_diameter()},
          {"fingerprint", hex64(s.fingerprint())}};
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int main(const std::vector<std::string>& raw) {
    CLI::App app{"Translation surfaces, geodesic flow and spreading experiments", "flatflow"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", kVersion);
    std::string config;
    std::size_t threads = 0;
    app.add_option("--config", config, "JSON file of option values; command-line flags override it");
    app.add_option("--threads", threads, "Worker threads (default: FLATFLOW_THREADS or hardware)");
    app.require_subcommand(1);
    setup(app);

    int code = kOk;
    try {
      const Splice sp = splice_config(raw);
      std::vector<std::string> rev(sp.args.rbegin(), sp.args.rend());
      app.parse(rev);
      if (threads > 0) set_thread_count(threads);
      action_();
    } catch (const CLI::ParseError& e) {
      code = app.exit(e, out_, err_);
      if (code != 0) code = kValidation;
    } catch (const VertexHitError& e) {
      err_ << "error: " << e.what() << "\n";
      code = kVertexHit;
    } catch (const Error& e) {
      err_ << "error: " << e.what() << "\n";
      switch (e.code()) {
        case ErrorCode::BudgetExhausted: code = kBudget; break;
        case ErrorCode::VertexHit: code = kVertexHit; break;
        case ErrorCode::Io: code = kFailure; break;
        default: code = kValidation; break;
      }
    } catch (const nlohmann::json::exception& e) {
      err_ << "error: Parse: " << e.what() << "\n";
      code = kValidation;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      code = kFailure;
    }
    set_thread_count(0);
    return code;
  }

 private:
  void header(const std::string& command, const TranslationSurface* s, std::optional<std::uint64_t> seed,
              const std::vector<std::pair<std::string, std::string>>& params) {
    err_ << "# flatflow " << kVersion << " " << command;
    if (s) err_ << " surface=" << hex64(s->fingerprint());
    if (seed) err_ << " seed=" << *seed;
    for (const auto& [k, v] : params) err_ << " " << k << "=" << v;
    err_ << " threads=" << thread_count() << " at=" << utc_now() << "\n";
  }

  void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-")
      out_ << text;
    else
      write_text_file(path, text);
  }

  static std::string num(double v) { return format_number(v); }

  void setup(CLI::App& app) {
    // surface
    auto* surf = app.add_subcommand("surface", "Build, check and transform surfaces");
    surf->require_subcommand(1);
    {
      auto* c = surf->add_subcommand("validate", "Check a surface file and print its invariants");
      c->add_option("file", surface_path_, "Surface JSON")->required();
      c->add_option("--out", out_path_, "Summary JSON path");
      c->callback([this] { action_ = [this] {
        const TranslationSurface s = read_surface(surface_path_);
        header("surface validate", &s, std::nullopt, {{"file", surface_path_}});
        emit(out_path_, surface_summary(s).dump(2) + "\n");
      }; });
    }
    {
      auto* c = surf->add_subcommand("unfold", "Unfold a rational polygon into a translation surface");
      c->add_option("--polygon", polygon_path_, "Polygon JSON")->required();
      c->add_option("--max-den", max_den_, "Largest angle denominator");
      c->add_flag("--normalize", normalize_, "Scale the result to area 1");
      c->add_option("--out", out_path_, "Surface JSON path");
      c->callback([this] { action_ = [this] {
        const RationalPolygon poly = rational_polygon_from_json(read_text_file(polygon_path_), max_den_);
        TranslationSurface s = unfold_rational_polygon(poly, {max_den_});
        if (normalize_) s = normalize_area(s);
        header("surface unfold", &s, std::nullopt, {{"polygon", polygon_path_}});
        emit(out_path_, surface_to_json(s));
      }; });
    }
    {
      auto* c = surf->add_subcommand("normalize", "Rescale a surface to area 1");
      c->add_option("file", surface_path_, "Surface JSON")->required();
      c->add_option("--out", out_path_, "Surface JSON path");
      c->callback([this] { action_ = [this] {
        const TranslationSurface s = normalize_area(read_surface(surface_path_));
        header("surface normalize", &s, std::nullopt, {{"file", surface_path_}});
        emit(out_path_, surface_to_json(s));
      }; });
    }
    {
      auto* c = surf->add_subcommand("torus", "Write the flat torus [0,w) x [0,h)");
      c->add_option("--width", width_, "Width")->check(CLI::PositiveNumber);
      c->add_option("--height", height_, "Height")->check(CLI::PositiveNumber);
      c->add_option("--out", out_path_, "Surface JSON path");
      c->callback([this] { action_ = [this] {
        const TranslationSurface s = make_torus(width_, height_);
        header("surface torus", &s, std::nullopt, {{"width", num(width_)}, {"height", num(height_)}});
        emit(out_path_, surface_to_json(s));
      }; });
    }

    auto surface_opt = [this](CLI::App* c) { c->add_option("--surface", surface_path_, "Surface JSON")->required(); };

    {
      auto* c = app.add_subcommand("trace", "Edge crossings of one geodesic as CSV");
      surface_opt(c);
      orbit_.add(c, false);
      c->add_option("--hits", max_hits_, "Stop after this many crossings");
      c->add_option("--time", max_time_, "Stop at this flow time");
      c->add_option("--out", out_path_, "CSV path");
      c->callback([this] { action_ = [this] {
        const TranslationSurface s = read_surface(surface_path_);
        header("trace", &s, std::nullopt, {{"theta", num(orbit_.theta)}, {"hits", std::to_string(max_hits_)}});
        TraceBudget b;
        b.max_hits = max_hits_;
        if (max_time_ > 0.0) b.max_time = max_time_;
        emit(out_path_, hits_to_csv(trace(s, orbit_.start(s), b)));
      }; });
    }
    {
      auto* c = app.add_subcommand("hitting", "Projected hitting set, one value per line");
      surface_opt(c);
      orbit_.add(c, true);
      c->add_option("--out", out_path_, "Text path");
      c->callback([this] { action_ = [this] {
        const TranslationSurface s = read_surface(surface_path_);
        header("hitting", &s, std::nullopt, {{"theta", num(orbit_.theta)}, {"M", std::to_string(orbit_.M)}});
        emit(out_path_, hitting_set_to_text(hitting_set(s, orbit_.start(s), orbit_.M)));
      }; });
    }
    {
      auto* c = app.add_subcommand("iet", "Induced interval exchange for one direction");
      surface_opt(c);
      c->add_option("--theta", orbit_.theta, "Direction in radians")->required();
      c->add_option("--out", out_path_, "JSON path");
      c->callback([this] { action_ = [this] {
        const TranslationSurface s = read_surface(surface_path_);
        header("iet", &s, std::nullopt, {{"theta", num(orbit_.theta)}});
        emit(out_path_, iet_to_json(induced_iet(s, orbit_.theta)));
      }; });
    }
    {
      auto* c = app.add_subcommand("saddle", "Saddle connections up to length T as CSV");
      surface_opt(c);
      c->add_option("--T", T_, "Length bound")->required()->check(CLI::PositiveNumber);
      c->add_option("--budget", budget_, "Face copies visited per starting sector");
      c->add_option("--out", out_path_, "CSV path");
      c->callback([this] { action_ = [this] {
        const TranslationSurface s = read_surface(surface_path_);
        header("saddle", &s, std::nullopt, {{"T", num(T_)}});
        emit(out_path_, saddles_to_csv(enumerate_saddle_connections(s, T_, {budget_})));
      }; });
    }
    {
      auto* c = app.add_subcommand("omega", "Bad directions around short saddle and periodic directions");
      surface_opt(c);
      c->add_option("--n", n_, "Scale exponent")->required();
      c->add_option("--c0", c0_, "Width constant, at least 4")->required();
      c->add_option("--budget", budget_, "Face copies visited per starting sector");
      c->add_option("--out", out_path_, "JSON path");
      c->callback([this] { action_ = [this] {
        const TranslationSurface s = read_surface(surface_path_);
        header("omega", &s, std::nullopt, {{"n", num(n_)}, {"c0", num(c0_)}});
        const IntervalUnion u = omega_set(s, n_, c0_, {budget_});
        nlohmann::json j{{"n", n_}, {"c0", c0_}, {"measure", u.measure()},
                         {"intervals", nlohmann::json::parse(u.to_json())}};
        emit(out_path_, j.dump(2) + "\n");
      }; });
    }
    {
      auto* c = app.add_subcommand("good", "Good directions for scale N and tolerance eps");
      surface_opt(c);
      c->add_option("--N", N_, "Scale")->required();
      c->add_option("--eps", eps_, "Tolerance in (0, 1)")->required();
      c->add_option("--k", good_k_, "Number of scales");
      c->add_option("--z1", z1_, "log2 of the partition base");
      c->add_option("--cstar", cstar_, "Counting constant (fitted when omitted)");
      c->add_option("--budget", budget_, "Face copies visited per starting sector");
      c->add_option("--out", out_path_, "JSON path");
      c->callback([this] { action_ = [this] {
        const TranslationSurface s = read_surface(surface_path_);
        header("good", &s, std::nullopt, {{"N", num(N_)}, {"eps", num(eps_)}, {"k", std::to_string(good_k_)}});
        emit(out_path_, good_json(compute_good(s)).dump(2) + "\n");
      }; });
    }
    {
      auto* c = app.add_subcommand("balance", "Partition statistics of a point set or hitting set");
      c->add_option("--points", points_path_, "File with one point of [0,1) per line");
      c->add_option("--surface", surface_path_, "Surface JSON (hitting set source)");
      orbit_.add(c, true);
      c->add_option("--z1", z1_, "log2 of the partition base");
      c->add_option("--p", p_, "Depth")->check(CLI::PositiveNumber);
      c->add_option("--delta", delta_, "Balance tolerance in (0, 1)");
      c->add_option("--A", A_, "Anti-crowding constant");
      c->add_option("--M1", M1_, "Anti-crowding scale");
      c->add_option("--out", out_path_, "JSON path");
      c->callback([this] { action_ = [this] {
        const auto [pts, s] = load_points();
        header("balance", s ? &*s : nullptr, std::nullopt,
               {{"z1", std::to_string(z1_)}, {"p", std::to_string(p_)}, {"delta", num(delta_)}});
        emit(out_path_, balance_report_to_json(balance_report(pts, {z1_, p_}, delta_, A_, M1_)));
      }; });
    }
    {
      auto* c = app.add_subcommand("constants", "Constants ledger and parameter choice");
      surface_opt(c);
      c->add_option("--eps", eps_, "Tolerance in (0, 1)")->required();
      c->add_option("--N", N_, "Scale");
      c->add_option("--cstar", cstar_, "Counting constant (fitted when omitted)");
      c->add_option("--c5", c5_, "Transport length constant (measured when omitted)");
      c->add_option("--c6", c6_, "Disjoint window constant (measured when omitted)");
      c->add_option("--T", T_, "Enumeration length for fitting C*");
      c->add_option("--runs", runs_, "Transport runs for c5 and c6");
      c->add_option("--seed", seed_, "Seed for transport sampling");
      c->add_option("--budget", budget_, "Face copies visited per starting sector");
      c->add_option("--out", out_path_, "JSON path");
      c->callback([this] { action_ = [this] {
        const TranslationSurface s = read_surface(surface_path_);
        header("constants", &s, seed_, {{"eps", num(eps_)}, {"N", num(N_)}});
        EmpiricalInputs in;
        if (cstar_ > 0.0) {
          in.c_star = cstar_;
        } else {
          in.c_star = fit_counting_constant(direction_set(s, T_, {budget_})).c_star;
          in.c_star_source = "fit of saddle direction counts up to T=" + num(T_);
        }
        if (c5_ > 0.0 && c6_ > 0.0) {
          in.c5 = c5_;
          in.c6 = c6_;
        } else {
          const auto tc = empirical_transport_constants(sample_transports(s, runs_, seed_), minimal_c0(in.c_star, eps_));
          in.c5 = c5_ > 0.0 ? c5_ : tc.c5;
          in.c6 = c6_ > 0.0 ? c6_ : tc.c6;
          const std::string src = "min over " + std::to_string(tc.runs) + " transport runs, seed " + std::to_string(seed_);
          if (!(c5_ > 0.0)) in.c5_source = src;
          if (!(c6_ > 0.0)) in.c6_source = src;
        }
        const SurfaceConstants k = derive_constants(s, in, eps_);
        const ParameterChoice p = choose_parameters(k, eps_, N_);
        emit(out_path_, constants_to_json(k, &p));
      }; });
    }
    {
      auto* c = app.add_subcommand("spread", "Cell occupancy experiment over sampled directions");
      surface_opt(c);
      c->add_option("--N", grid_N_, "Cells of side 1/N")->check(CLI::PositiveNumber);
      c->add_option("--eps", eps_, "Tolerance");
      c->add_option("--T", T_, "Flow time")->check(CLI::PositiveNumber);
      c->add_option("--dirs", dirs_, "Sampled directions")->check(CLI::PositiveNumber);
      c->add_option("--starts", starts_, "Start points per direction")->check(CLI::PositiveNumber);
      c->add_option("--seed", seed_, "Sampling seed");
      c->add_option("--good-k", good_k_, "Also compare with good directions using this many scales");
      c->add_option("--out", out_path_, "JSON path");
      c->add_option("--csv", csv_path_, "Flattened CSV path");
      compare_good_ = false;
      c->callback([this, c] { action_ = [this, c] {
        const TranslationSurface s = read_surface(surface_path_);
        header("spread", &s, seed_,
               {{"N", std::to_string(grid_N_)}, {"eps", num(eps_)}, {"T", num(T_)}, {"dirs", std::to_string(dirs_)}});
        SpreadOptions o;
        o.N = grid_N_;
        o.epsilon = eps_;
        o.T = T_;
        o.directions = dirs_;
        o.starts = starts_;
        o.seed = seed_;
        std::optional<GoodDirections> good;
        if (c->count("--good-k") > 0) {
          N_ = grid_N_;
          good = compute_good(s);
        }
        const SpreadReport r = spread_experiment(s, o, good ? &good->set : nullptr);
        emit(out_path_, spread_report_to_json(r));
        if (!csv_path_.empty()) write_text_file(csv_path_, spread_report_to_csv(r));
      }; });
    }
    {
      auto* c = app.add_subcommand("discrepancy", "Star discrepancy of a point set or hitting set");
      c->add_option("--points", points_path_, "File with one point of [0,1) per line");
      c->add_option("--surface", surface_path_, "Surface JSON (hitting set source)");
      orbit_.add(c, true);
      c->add_option("--out", out_path_, "JSON path");
      c->callback([this] { action_ = [this] {
        const auto [pts, s] = load_points();
        header("discrepancy", s ? &*s : nullptr, std::nullopt, {{"M", std::to_string(pts.size())}});
        const double d = star_discrepancy(pts);
        const double M = static_cast<double>(pts.size());
        nlohmann::json j{{"M", pts.size()}, {"star_discrepancy", d}};
        if (pts.size() > 1) j["scaled"] = M * d / std::log(M);
        emit(out_path_, j.dump(2) + "\n");
      }; });
    }
  }

  std::pair<std::vector<double>, std::optional<TranslationSurface>> load_points() {
    if (!points_path_.empty()) return {read_points(points_path_), std::nullopt};
    if (surface_path_.empty()) throw Error(ErrorCode::InvalidArgument, "need --points or --surface");
    TranslationSurface s = read_surface(surface_path_);
    std::vector<double> pts = hitting_set(s, orbit_.start(s), orbit_.M).points;
    return {std::move(pts), std::move(s)};
  }

  GoodDirections compute_good(const TranslationSurface& s) {
    GoodDirectionOptions g;
    g.k = good_k_;
    g.z1 = z1_;
    g.c_star = cstar_;
    g.saddle.node_budget = budget_;
    return good_directions(s, N_, eps_, g);
  }

  static nlohmann::json good_json(const GoodDirections& g) {
    return {{"N", std::exp2(g.n1)},
            {"epsilon", g.epsilon},
            {"eta", g.eta},
            {"k", g.k},
            {"z1", g.z1},
            {"c0", g.c0},
            {"c_star", g.c_star},
            {"enumeration_T", g.enumeration_T},
            {"omega_measures", g.omega_measures},
            {"measure", g.set.measure()},
            {"target", g.target},
            {"meets_target", g.meets_target},
            {"intervals", nlohmann::json::parse(g.set.to_json())}};
  }

  std::ostream& out_;
  std::ostream& err_;
  std::function<void()> action_ = [] {};

  std::string surface_path_, out_path_, csv_path_, polygon_path_, points_path_;
  long max_den_ = 1000;
  bool normalize_ = false;
  bool compare_good_ = false;
  double width_ = 1.0, height_ = 1.0;
  Orbit orbit_;
  std::size_t max_hits_ = 1000;
  double max_time_ = 0.0;
  double T_ = 16.0;
  std::size_t budget_ = SaddleOptions{}.node_budget;
  double n_ = 3.0, c0_ = 16.0;
  double N_ = 8.0, eps_ = 0.25;
  int good_k_ = GoodDirectionOptions{}.k;
  int z1_ = 2, p_ = 3;
  double delta_ = 0.5, A_ = 0.0, M1_ = 0.0;
  double cstar_ = 0.0, c5_ = 0.0, c6_ = 0.0;
  std::size_t runs_ = 20;
  std::uint64_t seed_ = 7;
  int grid_N_ = 8;
  std::size_t dirs_ = 256, starts_ = 1;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Runner r(out, err);
  return r.main(args);
}

}  // namespace flatflow::cli
