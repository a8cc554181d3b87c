// qtheta: expand q-series expressions, replay check scripts, verify congruence
// families. Exit codes: 0 pass, 1 a check failed, 2 usage or input error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtheta/congruence.hpp"
#include "qtheta/dsl.hpp"
#include "qtheta/famspec.hpp"
#include "qtheta/parallel.hpp"
#include "qtheta/series_io.hpp"

using json = nlohmann::ordered_json;
using namespace qtheta;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr Exponent kDefaultTableOrder = 200000;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// reports

struct Report {
  std::string command;
  std::string input_digest;
  json items = json::array();
  json timing = json::object();
  bool passed = true;

  json to_json(bool with_timing) const {
    json body;
    body["tool"] = "qtheta";
    body["version"] = kVersion;
    body["command"] = command;
    body["input_digest"] = input_digest;
    body["status"] = passed ? "pass" : "fail";
    body["items"] = items;
    json out = body;
    out["report_digest"] = sha256_hex(body.dump());
    if (with_timing) out["timing"] = timing;
    return out;
  }
};

void write_report(const Report& rep, const std::string& path, bool with_timing) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write report " + path);
  out << rep.to_json(with_timing).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// check

json item_json(const dsl::ItemResult& r) {
  json j;
  j["id"] = r.id;
  j["kind"] = "check";
  j["status"] = dsl::to_string(r.status);
  j["mode"] = r.mode;
  j["order"] = r.requested_order;
  j["compared_to"] = r.compared_to;
  if (r.mismatch) j["first_mismatch"] = {{"exponent", r.mismatch->exponent}, {"lhs", r.mismatch->lhs}, {"rhs", r.mismatch->rhs}};
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

void run_check_script(const std::string& path, std::optional<Exponent> order, unsigned jobs, Report& rep) {
  const std::string text = slurp(path);
  const auto items = dsl::parse_check_script(text);
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = dsl::run_checks(items, {order, jobs});
  std::size_t passed = 0;
  for (const auto& r : res.items) {
    rep.items.push_back(item_json(r));
    rep.timing["items"][r.id] = r.seconds;
    if (r.status == dsl::ItemStatus::pass) {
      ++passed;
      continue;
    }
    std::cout << r.id << ": " << dsl::to_string(r.status);
    if (r.mismatch)
      std::cout << " at exponent " << r.mismatch->exponent << " (lhs " << r.mismatch->lhs << ", rhs " << r.mismatch->rhs
                << ")";
    if (!r.message.empty()) std::cout << " (" << r.message << ")";
    std::cout << '\n';
  }
  rep.timing["checks_seconds"] = since(t0);
  rep.passed = rep.passed && res.passed();
  std::cout << "checks: " << passed << "/" << res.items.size() << " passed\n";
}

// ---------------------------------------------------------------------------
// families

struct TableSet {
  std::map<std::tuple<int, int, int>, CoefficientTable> tables;

  const CoefficientTable& get(int r, int s, int w) const {
    const auto it = tables.find({r, s, w});
    if (it == tables.end()) throw Error("table c_{" + std::to_string(r) + "," + std::to_string(s) + "} mod 2^" +
                                        std::to_string(w) + " was not built");
    return it->second;
  }
};

TableSet build_tables(const std::set<std::tuple<int, int, int>>& keys, Exponent n, unsigned jobs, bool use_cache) {
  const std::vector<std::tuple<int, int, int>> todo(keys.begin(), keys.end());
  std::vector<std::optional<CoefficientTable>> built(todo.size());
  const SeriesCache cache = SeriesCache::from_env();
  parallel_for(todo.size(), jobs, [&](std::size_t i) {
    const auto [r, s, w] = todo[i];
    const Ring ring = Ring::mod2w(w);
    const std::string expr = "1/Psi(-q^" + std::to_string(r) + ",q^" + std::to_string(s) + ")";
    const std::string key = SeriesCache::key(expr, ring, n);
    if (use_cache) {
      if (auto hit = cache.load(key); hit && hit->ring() == ring && hit->order() == n && hit->min_exp() == 0) {
        built[i].emplace(r, s, std::move(*hit));
        return;
      }
    }
    built[i].emplace(c_table(r, s, ring, n));
    if (use_cache) cache.store(key, built[i]->series());
  });
  TableSet set;
  for (std::size_t i = 0; i < todo.size(); ++i) set.tables.emplace(todo[i], std::move(*built[i]));
  return set;
}

json violation_json(const Violation& v) { return {{"n", v.n}, {"index", v.index}, {"value", v.value}}; }

struct FamilyOptions {
  Exponent order = kDefaultTableOrder;
  std::size_t samples = 30;
  std::optional<std::size_t> primes;
  std::vector<std::string> only;
  unsigned jobs = 1;
  bool cache = true;
};

void run_families(const std::string& path, const FamilyOptions& opt, Report& rep) {
  FamilyFile file = parse_famspec(slurp(path));
  if (opt.primes) {
    if (*opt.primes == 0) throw UsageError("--primes must be at least 1");
    for (auto& f : file.families) f.prime_count = *opt.primes;
  }
  if (!opt.only.empty()) {
    auto keep = [&](const std::string& id) { return std::find(opt.only.begin(), opt.only.end(), id) != opt.only.end(); };
    std::erase_if(file.families, [&](const auto& f) { return !keep(f.id); });
    std::erase_if(file.relations, [&](const auto& f) { return !keep(f.id); });
    std::erase_if(file.characterizations, [&](const auto& f) { return !keep(f.id); });
    std::erase_if(file.obstructions, [&](const auto& f) { return !keep(f.id); });
    if (file.size() == 0) throw UsageError("no record matches --only");
  }

  std::set<std::tuple<int, int, int>> keys;
  for (const auto& f : file.families) keys.insert({f.r, f.s, f.modulus_bits});
  for (const auto& r : file.relations) {
    keys.insert({r.lhs.r, r.lhs.s, r.modulus_bits});
    keys.insert({r.rhs.r, r.rhs.s, r.modulus_bits});
  }
  for (const auto& c : file.characterizations) keys.insert({c.r, c.s, 1});
  for (const auto& o : file.obstructions) keys.insert({o.r, o.s, 1});

  auto t0 = std::chrono::steady_clock::now();
  const TableSet tables = build_tables(keys, opt.order, opt.jobs, opt.cache);
  rep.timing["tables_seconds"] = since(t0);
  t0 = std::chrono::steady_clock::now();

  std::size_t total = 0, passed = 0;
  auto record = [&](json j, bool ok) {
    ++total;
    if (ok) ++passed;
    rep.passed = rep.passed && ok;
    if (!ok) std::cout << j["id"].get<std::string>() << ": " << j["status"].get<std::string>() << '\n';
    rep.items.push_back(std::move(j));
  };

  for (const auto& f : file.families) {
    json j{{"id", f.id}, {"kind", "family"}, {"provenance", f.provenance}, {"r", f.r}, {"s", f.s},
           {"modulus", "2^" + std::to_string(f.modulus_bits)}};
    try {
      VerifyOptions vo;
      vo.samples = opt.samples;
      vo.jobs = opt.jobs;
      const FamilyReport fr = verify_family(f, tables.get(f.r, f.s, f.modulus_bits), vo);
      json inst = json::array();
      for (const auto& ir : fr.instances) {
        json x{{"base", ir.inst.base}, {"k", ir.inst.k}, {"m", ir.inst.m}, {"stride", ir.inst.stride.get_str()},
               {"offset", ir.inst.offset.get_str()}, {"status", to_string(ir.status)}, {"checked", ir.checked}};
        if (ir.first_violation) x["first_violation"] = violation_json(*ir.first_violation);
        inst.push_back(std::move(x));
      }
      const bool ok = fr.passed();
      j["status"] = ok ? "pass" : (fr.count(InstanceStatus::fail) ? "fail" : "insufficient");
      j["instances"] = std::move(inst);
      record(std::move(j), ok);
    } catch (const Error& e) {
      j["status"] = "error";
      j["message"] = e.what();
      record(std::move(j), false);
    }
  }

  for (const auto& rel : file.relations) {
    json j{{"id", rel.id}, {"kind", "relation"}, {"provenance", rel.provenance}};
    try {
      const TableLookup lookup = [&](int r, int s) -> const CoefficientTable& {
        return tables.get(r, s, rel.modulus_bits);
      };
      const RelationReport rr = verify_relation(rel, lookup);
      json inst = json::array();
      for (const auto& ri : rr.instances) {
        json x{{"k", ri.k},
               {"lhs", "c_{" + std::to_string(rel.lhs.r) + "," + std::to_string(rel.lhs.s) + "}(" +
                           ri.lhs_stride.get_str() + "n+" + ri.lhs_offset.get_str() + ")"},
               {"rhs", "c_{" + std::to_string(rel.rhs.r) + "," + std::to_string(rel.rhs.s) + "}(" +
                           ri.rhs_stride.get_str() + "n+" + ri.rhs_offset.get_str() + ")"},
               {"checked", ri.checked}};
        if (ri.first_mismatch_n) x["first_mismatch_n"] = *ri.first_mismatch_n;
        inst.push_back(std::move(x));
      }
      j["status"] = rr.passed() ? "pass" : "fail";
      j["instances"] = std::move(inst);
      record(std::move(j), rr.passed());
    } catch (const Error& e) {
      j["status"] = "error";
      j["message"] = e.what();
      record(std::move(j), false);
    }
  }

  auto char_json = [](json j, const CharacterizationReport& cr) {
    j["status"] = cr.passed() ? "pass" : "fail";
    j["checked"] = cr.checked;
    j["represented"] = cr.represented;
    if (cr.first_counterexample) j["first_counterexample_n"] = *cr.first_counterexample;
    return j;
  };
  for (const auto& c : file.characterizations) {
    json j{{"id", c.id}, {"kind", "characterization"}, {"provenance", c.provenance},
           {"mode", c.mode == CharacterizationMode::iff ? "iff" : "implies"}};
    try {
      const auto cr = check_iff_characterization(tables.get(c.r, c.s, 1), c.stride, c.offset, c.form, c.n_max, c.mode);
      const bool ok = cr.passed();
      record(char_json(std::move(j), cr), ok);
    } catch (const Error& e) {
      j["status"] = "error";
      j["message"] = e.what();
      record(std::move(j), false);
    }
  }
  for (const auto& o : file.obstructions) {
    json j{{"id", o.id}, {"kind", "obstruction"}, {"provenance", o.provenance}};
    try {
      const auto cr = check_two_square_obstruction(tables.get(o.r, o.s, 1), o.stride, o.offset, o.value_scale,
                                                   o.value_shift, o.form, o.n_max);
      const bool ok = cr.passed();
      record(char_json(std::move(j), cr), ok);
    } catch (const Error& e) {
      j["status"] = "error";
      j["message"] = e.what();
      record(std::move(j), false);
    }
  }
  rep.timing["families_seconds"] = since(t0);
  std::cout << "families: " << passed << "/" << total << " passed\n";
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
  CLI::App app{"q-series toolkit: theta functions, reciprocal false theta coefficients, congruence checks"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  unsigned jobs = default_jobs();
  std::string report_path;
  bool no_timing = false;
  bool no_cache = false;
  auto add_common = [&](CLI::App* c) {
    c->add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber);
    c->add_option("--report", report_path, "write a JSON report to PATH");
    c->add_flag("--no-timing", no_timing, "omit timing from the report");
  };

  // expand
  auto* expand = app.add_subcommand("expand", "print the coefficients of an expression");
  std::string expr_text;
  Exponent order = 20;
  std::string ring_text = "exact";
  expand->add_option("expr", expr_text, "expression")->required();
  expand->add_option("--order,-n", order, "truncation order")->check(CLI::PositiveNumber);
  expand->add_option("--ring", ring_text, "exact or mod2^w");

  // check
  auto* check = app.add_subcommand("check", "run a check script");
  std::string script_path;
  std::optional<Exponent> order_override;
  check->add_option("script", script_path, "check script")->required();
  check->add_option("--order,-n", order_override, "override every item's order")->check(CLI::PositiveNumber);
  add_common(check);

  // verify-families
  auto* fam = app.add_subcommand("verify-families", "verify congruence families from a famspec file");
  std::string fam_path;
  FamilyOptions fopt;
  std::optional<std::size_t> primes;
  fam->add_option("famspec", fam_path, "family specification file")->required();
  fam->add_option("--order,-n", fopt.order, "table order")->check(CLI::PositiveNumber);
  fam->add_option("--samples", fopt.samples, "samples per instantiation (0: all that fit)");
  fam->add_option("--primes", primes, "number of eligible primes per family");
  fam->add_option("--only", fopt.only, "restrict to these record ids");
  fam->add_flag("--no-cache", no_cache, "do not read or write the table cache");
  add_common(fam);

  // scan
  auto* scan = app.add_subcommand("scan", "search for progressions with all-even coefficients");
  int r = 0, s = 0;
  Exponent stride_max = 72, min_hits = 30, scan_order = kDefaultTableOrder;
  scan->add_option("r", r)->required();
  scan->add_option("s", s)->required();
  scan->add_option("--stride-max", stride_max, "largest stride")->check(CLI::PositiveNumber);
  scan->add_option("--order,-n", scan_order, "table order")->check(CLI::PositiveNumber);
  scan->add_option("--min-hits", min_hits, "minimum sampled indices")->check(CLI::PositiveNumber);

  // verify-paper
  auto* paper = app.add_subcommand("verify-paper", "check script plus family file");
  std::string paper_checks = "checks/paper.chk", paper_fams = "families/paper.famspec";
  paper->add_option("--checks", paper_checks, "check script");
  paper->add_option("--families", paper_fams, "family file");
  paper->add_option("--order,-n", fopt.order, "table order for families")->check(CLI::PositiveNumber);
  paper->add_option("--check-order", order_override, "override check item orders")->check(CLI::PositiveNumber);
  paper->add_option("--samples", fopt.samples, "samples per instantiation");
  paper->add_option("--primes", primes, "number of eligible primes per family");
  paper->add_flag("--no-cache", no_cache, "do not read or write the table cache");
  add_common(paper);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (expand->parsed()) {
      const Ring ring = Ring::parse(ring_text);
      const auto e = dsl::parse(expr_text);
      const Series v = dsl::eval(*e, ring, order);
      if (ring.is_gf2()) {
        std::string bits;
        for (Exponent i = 0; i < v.order(); ++i) bits += v.odd(i) ? '1' : '0';
        std::cout << bits << '\n';
      } else {
        for (const auto& [ex, c] : v.nonzero_terms()) std::cout << ex << ' ' << c.get_str() << '\n';
      }
      if (v.order() < order) std::cerr << "note: guaranteed order is " << v.order() << '\n';
      return 0;
    }

    Report rep;
    fopt.jobs = jobs;
    fopt.primes = primes;
    fopt.cache = !no_cache;
    if (check->parsed()) {
      rep.command = "check";
      rep.input_digest = sha256_hex(slurp(script_path) + "|order=" +
                                    (order_override ? std::to_string(*order_override) : std::string("default")));
      run_check_script(script_path, order_override, jobs, rep);
    } else if (fam->parsed() || paper->parsed()) {
      const bool both = paper->parsed();
      const std::string fpath = both ? paper_fams : fam_path;
      rep.command = both ? "verify-paper" : "verify-families";
      std::string material = slurp(fpath) + "|order=" + std::to_string(fopt.order) +
                             "|samples=" + std::to_string(fopt.samples) +
                             "|primes=" + (primes ? std::to_string(*primes) : std::string("default"));
      for (const auto& id : fopt.only) material += "|only=" + id;
      if (both)
        material = slurp(paper_checks) + "|check-order=" +
                   (order_override ? std::to_string(*order_override) : std::string("default")) + "|" + material;
      rep.input_digest = sha256_hex(material);
      if (both) run_check_script(paper_checks, order_override, jobs, rep);
      run_families(fpath, fopt, rep);
    } else if (scan->parsed()) {
      const CoefficientTable t = c_table(r, s, Ring::gf2(), scan_order);
      const auto cands = scan_progressions(t, stride_max, min_hits);
      std::cout << "EMPIRICAL candidates for c_{" << r << "," << s << "} below " << scan_order
                << " (not theorems):\n";
      for (const auto& c : cands) std::cout << c.stride << "n+" << c.offset << "  hits=" << c.hits << '\n';
      return 0;
    }
    write_report(rep, report_path, !no_timing);
    std::cout << (rep.passed ? "PASS" : "FAIL") << '\n';
    return rep.passed ? 0 : 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
