#include "medtrade/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "medtrade/errors.hpp"

namespace medtrade {
namespace {

using nlohmann::json;

double get_num(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw input_error(std::string("missing numeric field '") + key + "'");
  return j[key].get<double>();
}

std::string get_str(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw input_error(std::string("missing string field '") + key + "'");
  return j[key].get<std::string>();
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

json to_json(const Distribution& d) {
  json j;
  j["family"] = d.family_name();
  d.visit([&](const auto& impl) {
    using T = std::decay_t<decltype(impl)>;
    if constexpr (std::is_same_v<T, Distribution::Uniform>) {
      j["lo"] = impl.lo;
      j["hi"] = impl.hi;
    } else if constexpr (std::is_same_v<T, Distribution::TruncatedExponential>) {
      j["rate"] = impl.rate;
      j["lo"] = impl.lo;
      j["hi"] = impl.hi;
    } else if constexpr (std::is_same_v<T, Distribution::TruncatedNormal>) {
      j["mu"] = impl.mu;
      j["sigma"] = impl.sigma;
      j["lo"] = impl.lo;
      j["hi"] = impl.hi;
    } else {
      json knots = json::array();
      for (std::size_t i = 0; i < impl.xs.size(); ++i)
        knots.push_back({impl.xs[i], impl.ys[i]});
      j["knots"] = knots;
    }
  });
  return j;
}

Distribution distribution_from_json(const json& j) {
  const std::string family = get_str(j, "family");
  try {
    if (family == "uniform")
      return Distribution::uniform(get_num(j, "lo"), get_num(j, "hi"));
    if (family == "truncated_exponential")
      return Distribution::truncated_exponential(
          get_num(j, "rate"), get_num(j, "lo"), get_num(j, "hi"));
    if (family == "truncated_normal")
      return Distribution::truncated_normal(get_num(j, "mu"),
                                            get_num(j, "sigma"),
                                            get_num(j, "lo"), get_num(j, "hi"));
    if (family == "piecewise_linear") {
      if (!j.contains("knots") || !j["knots"].is_array())
        throw input_error("piecewise_linear: missing 'knots' array");
      std::vector<std::array<double, 2>> knots;
      for (const auto& k : j["knots"]) {
        if (!k.is_array() || k.size() != 2)
          throw input_error("piecewise_linear: each knot must be [x, y]");
        knots.push_back({k[0].get<double>(), k[1].get<double>()});
      }
      return Distribution::piecewise_linear_pdf(std::move(knots));
    }
  } catch (const std::invalid_argument& e) {
    throw input_error(std::string("bad distribution: ") + e.what());
  }
  throw input_error("unknown distribution family '" + family + "'");
}

json to_json(const Valuation& v) {
  json j;
  if (v.is_linear()) {
    j["kind"] = "linear";
    json a;
    v.alpha().visit([&](const auto& impl) {
      using T = std::decay_t<decltype(impl)>;
      if constexpr (std::is_same_v<T, AlphaFunction::Power>) {
        a["form"] = "power";
        a["exponent"] = impl.exponent;
        a["scale"] = impl.scale;
      } else if constexpr (std::is_same_v<T, AlphaFunction::Affine>) {
        a["form"] = "affine";
        a["intercept"] = impl.intercept;
        a["slope"] = impl.slope;
      } else if constexpr (std::is_same_v<T, AlphaFunction::Exponential>) {
        a["form"] = "exponential";
        a["scale"] = impl.scale;
        a["rate"] = impl.rate;
      } else {
        a["form"] = "spline";
        a["xs"] = impl.xs;
        a["ys"] = impl.ys;
      }
    });
    j["alpha"] = a;
    return j;
  }
  j["kind"] = "general";
  if (v.general_form().empty())
    throw input_error(
        "general valuations built from raw callables cannot be serialized; "
        "use a named form");
  j["form"] = v.general_form();
  if (v.general_form() == "power_product") {
    j["scale"] = v.general_params()[0];
    j["q_exp"] = v.general_params()[1];
    j["t_exp"] = v.general_params()[2];
  }
  return j;
}

Valuation valuation_from_json(const json& j) {
  const std::string kind = get_str(j, "kind");
  try {
    if (kind == "linear") {
      if (!j.contains("alpha") || !j["alpha"].is_object())
        throw input_error("linear valuation: missing 'alpha' object");
      const json& a = j["alpha"];
      const std::string form = get_str(a, "form");
      if (form == "power")
        return Valuation::linear_in_type(AlphaFunction::power(
            get_num(a, "exponent"),
            a.contains("scale") ? get_num(a, "scale") : 1.0));
      if (form == "affine")
        return Valuation::linear_in_type(
            AlphaFunction::affine(get_num(a, "intercept"), get_num(a, "slope")));
      if (form == "exponential")
        return Valuation::linear_in_type(
            AlphaFunction::exponential(get_num(a, "scale"), get_num(a, "rate")));
      if (form == "spline") {
        if (!a.contains("xs") || !a.contains("ys"))
          throw input_error("spline alpha: missing 'xs'/'ys'");
        return Valuation::linear_in_type(AlphaFunction::monotone_spline(
            a["xs"].get<std::vector<double>>(),
            a["ys"].get<std::vector<double>>()));
      }
      throw input_error("unknown alpha form '" + form + "'");
    }
    if (kind == "general") {
      const std::string form = get_str(j, "form");
      if (form == "power_product")
        return Valuation::power_product(
            j.contains("scale") ? get_num(j, "scale") : 1.0,
            j.contains("q_exp") ? get_num(j, "q_exp") : 1.0,
            j.contains("t_exp") ? get_num(j, "t_exp") : 1.0);
      if (form == "product_plus_t") return Valuation::product_plus_t();
      throw input_error("unknown general valuation form '" + form + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw input_error(std::string("bad valuation: ") + e.what());
  }
  throw input_error("unknown valuation kind '" + kind + "'");
}

json to_json(const ProblemInstance& inst) {
  json j;
  j["q_dist"] = to_json(inst.q_dist);
  j["t_dist"] = to_json(inst.t_dist);
  j["valuation"] = to_json(inst.valuation);
  j["reserve"] = inst.reserve;
  return j;
}

ProblemInstance instance_from_json(const json& j) {
  if (!j.is_object()) throw input_error("instance: expected a JSON object");
  for (const char* key : {"q_dist", "t_dist", "valuation"})
    if (!j.contains(key))
      throw input_error(std::string("instance: missing '") + key + "'");
  return ProblemInstance{distribution_from_json(j["q_dist"]),
                         distribution_from_json(j["t_dist"]),
                         valuation_from_json(j["valuation"]),
                         get_num(j, "reserve")};
}

ProblemInstance load_instance(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw input_error("failed to parse '" + path + "': " + e.what());
  }
  return instance_from_json(j);
}

json to_json(const ThresholdMechanism& mech) {
  json j;
  j["instance"] = to_json(mech.instance);
  j["t1"] = mech.t1;
  j["t2"] = mech.t2;
  j["pay_seller"] = mech.pay_seller;
  j["grid"] = mech.grid;
  j["lambda"] = mech.lambda;
  j["r_b"] = mech.rb;
  j["cum_r_b"] = mech.cum_rb;
  j["pay_buyer"] = mech.pay;
  return j;
}

ThresholdMechanism mechanism_from_json(const json& j) {
  if (!j.is_object() || !j.contains("instance"))
    throw input_error("mechanism: expected an object with 'instance'");
  ThresholdMechanism mech{instance_from_json(j["instance"]),
                          j.value("grid", std::vector<double>{}),
                          j.value("lambda", std::vector<double>{}),
                          j.value("r_b", std::vector<double>{}),
                          j.value("cum_r_b", std::vector<double>{}),
                          j.value("pay_buyer", std::vector<double>{}),
                          get_num(j, "t1"),
                          get_num(j, "t2"),
                          get_num(j, "pay_seller")};
  const std::size_t n = mech.grid.size();
  if (n < 2 || mech.lambda.size() != n || mech.rb.size() != n ||
      mech.cum_rb.size() != n || mech.pay.size() != n)
    throw input_error("mechanism: grid arrays empty or of mismatched length");
  for (std::size_t i = 1; i < n; ++i)
    if (!(mech.grid[i] > mech.grid[i - 1]))
      throw input_error("mechanism: grid must strictly increase");
  return mech;
}

ThresholdMechanism load_mechanism(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw input_error("failed to parse '" + path + "': " + e.what());
  }
  return mechanism_from_json(j);
}

json to_json(const VerificationReport& report) {
  json j;
  j["tolerance"] = report.tolerance;
  j["feasible"] = report.feasible;
  j["grids"] = {{"t_points", report.t_points}, {"q_points", report.q_points}};
  json cs = json::array();
  for (const auto& c : report.constraints) {
    json e;
    e["name"] = c.name;
    e["worst_violation"] = c.worst_violation;
    json at;
    if (c.has_t) at["t"] = c.at_t;
    if (c.has_t_report) at["t_report"] = c.at_t_report;
    if (c.has_q) at["q"] = c.at_q;
    e["argmax"] = at;
    if (c.name == "pb_strict_decrease") e["min_slope"] = c.aux;
    cs.push_back(e);
  }
  j["constraints"] = cs;
  return j;
}

json to_json(const SimulationResult& result) {
  json j;
  j["n_runs"] = result.n_runs;
  j["seed"] = result.seed;
  j["mean_revenue"] = result.mean_revenue;
  j["se_revenue"] = result.se_revenue;
  j["trade_rate"] = result.trade_rate;
  json buckets = json::array();
  for (const auto& b : result.buyer_utility_buckets)
    buckets.push_back({{"t_lo", b.t_lo},
                       {"t_hi", b.t_hi},
                       {"count", b.count},
                       {"mean_utility", b.mean_utility}});
  j["buyer_utility_buckets"] = buckets;
  return j;
}

std::string format_report_table(const VerificationReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(32) << "constraint" << std::right
     << std::setw(16) << "worst" << std::setw(14) << "at t" << std::setw(14)
     << "at t'" << std::setw(14) << "at q" << '\n';
  os << std::string(90, '-') << '\n';
  auto cell = [&](bool has, double v) {
    if (has)
      os << std::setw(14) << std::setprecision(6) << v;
    else
      os << std::setw(14) << "-";
  };
  for (const auto& c : report.constraints) {
    os << std::left << std::setw(32) << c.name << std::right << std::setw(16)
       << std::setprecision(6) << std::scientific << c.worst_violation
       << std::defaultfloat;
    cell(c.has_t, c.at_t);
    cell(c.has_t_report, c.at_t_report);
    cell(c.has_q, c.at_q);
    os << '\n';
  }
  os << std::string(90, '-') << '\n';
  os << (report.feasible ? "FEASIBLE" : "INFEASIBLE") << " at tolerance "
     << report.tolerance << " on " << report.t_points << "x" << report.q_points
     << " grids\n";
  return os.str();
}

std::string mechanism_csv(const ThresholdMechanism& mech) {
  std::ostringstream os;
  os << "t,lambda,R_b,P_b,U_b\n";
  for (std::size_t i = 0; i < mech.size(); ++i)
    os << fmt17(mech.grid[i]) << ',' << fmt17(mech.lambda[i]) << ','
       << fmt17(mech.rb[i]) << ',' << fmt17(mech.pay[i]) << ','
       << fmt17(mech.cum_rb[i]) << '\n';
  return os.str();
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os << "grid_size,discrete_opt,closed_form,gap\n";
  for (const auto& r : rows)
    os << r.grid_size << ',' << fmt17(r.discrete_opt) << ','
       << fmt17(r.closed_form) << ',' << fmt17(r.gap) << '\n';
  return os.str();
}

std::string buckets_csv(const std::vector<UtilityBucket>& buckets) {
  std::ostringstream os;
  os << "t_lo,t_hi,count,mean_utility\n";
  for (const auto& b : buckets)
    os << fmt17(b.t_lo) << ',' << fmt17(b.t_hi) << ',' << b.count << ','
       << fmt17(b.mean_utility) << '\n';
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw input_error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace medtrade
