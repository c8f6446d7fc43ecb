#include "bethe_forge/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <deque>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>

#include "bethe_forge/characters.hpp"
#include "bethe_forge/parallel.hpp"
#include "bethe_forge/superext.hpp"

namespace bf {

using ojson = nlohmann::ordered_json;

Twist random_twist(SplitMix64& rng, int K, int M, int N) {
    std::vector<Rat> xi;
    while (static_cast<int>(xi.size()) < K + M) {
        Rat x = rng.small_rat();
        if (std::find(xi.begin(), xi.end(), x) == xi.end()) xi.push_back(x);
    }
    std::vector<Rat> theta;
    for (int i = 0; i < N; ++i) theta.push_back(rng.small_rat());
    return make_twist(K, M, xi, theta);
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"master", "tq", "qq", "hirota", "br", "bt", "wronskian", "comm", "removal", "super", "series"};
    return names;
}

namespace {

struct Outcome {
    bool zero = false;
    std::string residual;
};

Outcome from_op(const TensorOperator& r) { return {r.is_zero(), r.max_residual()}; }

struct Task {
    std::string check;
    ojson params;
    std::function<Outcome()> fn;
};

// operators computed at most once and shared between tasks of one draw
class LazyOps {
public:
    explicit LazyOps(std::vector<std::function<TensorOperator()>> makers) : makers_(std::move(makers)), vals_(makers_.size()) {
        for (std::size_t i = 0; i < makers_.size(); ++i) flags_.emplace_back();
    }
    const TensorOperator& get(std::size_t i) {
        std::call_once(flags_[i], [&] { vals_[i] = makers_[i](); });
        return vals_[i];
    }
    std::size_t size() const { return makers_.size(); }

private:
    std::vector<std::function<TensorOperator()>> makers_;
    std::vector<TensorOperator> vals_;
    std::deque<std::once_flag> flags_;
};

std::vector<IndexSet> subsets(int n) {
    std::vector<IndexSet> out;
    for (std::uint32_t m = 0; m < (1u << n); ++m) out.emplace_back(m);
    return out;
}

std::vector<Rat> fresh_points(SplitMix64& rng, const Twist& tw, int count) {
    std::vector<Rat> out;
    while (static_cast<int>(out.size()) < count) {
        Rat t = rng.small_rat();
        bool ok = std::find(out.begin(), out.end(), t) == out.end();
        for (const auto& x : tw.xi) ok = ok && x * t != 1;
        if (ok) out.push_back(t);
    }
    return out;
}

std::vector<YoungDiagram> diagrams(int aMax, int sMax) {
    std::vector<YoungDiagram> out;
    std::function<void(std::vector<int>&, int)> rec = [&](std::vector<int>& rows, int cap) {
        if (!rows.empty()) out.emplace_back(rows);
        if (static_cast<int>(rows.size()) == aMax) return;
        for (int r = 1; r <= cap; ++r) {
            rows.push_back(r);
            rec(rows, r);
            rows.pop_back();
        }
    };
    std::vector<int> rows;
    rec(rows, sMax);
    return out;
}

std::vector<NestingPath> all_paths(int n, std::size_t limit) {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k + 1;
    std::vector<NestingPath> out;
    do out.push_back(NestingPath::from_order(order));
    while (out.size() < limit && std::next_permutation(order.begin(), order.end()));
    return out;
}

std::string rats_str(const std::vector<Rat>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
    return s;
}

ojson twist_json(const Twist& tw) {
    ojson j;
    j["x"] = rats_str(tw.xi);
    j["theta"] = rats_str(tw.theta);
    return j;
}

std::uint64_t suite_salt(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    return h;
}

void build_tasks(const std::string& suite, const SuiteParams& p, int draw, const Twist& tw, SplitMix64& rng,
                 std::vector<Task>& tasks, std::vector<std::shared_ptr<LazyOps>>& keep) {
    const int n = tw.dim();
    auto base = [&](ojson extra) {
        ojson j;
        j["draw"] = draw;
        j["twist"] = twist_json(tw);
        for (auto& [k, v] : extra.items()) j[k] = v;
        return j;
    };
    auto add = [&](const std::string& check, ojson params, std::function<Outcome()> fn) {
        tasks.push_back(Task{check, base(std::move(params)), std::move(fn)});
    };
    const auto sets = subsets(n);
    if (suite == "master") {
        auto pts = fresh_points(rng, tw, 4);
        const std::vector<std::vector<WFactor>> pis{{}, {WFactor{pts[2], 1}}, {WFactor{pts[2], 1}, WFactor{pts[3], 1}}};
        for (std::size_t k = 0; k < pis.size(); ++k)
            add("master", ojson{{"z", pts[0].get_str()}, {"t", pts[1].get_str()}, {"pi_factors", k}},
                [tw, z = pts[0], t = pts[1], pi = pis[k]] { return from_op(check_master(tw, z, t, pi)); });
    } else if (suite == "tq") {
        for (IndexSet I : sets)
            for (int j = 1; j <= n; ++j)
                if (!I.contains(j))
                    for (int s = 0; s <= p.sMax; ++s)
                        add("tq", ojson{{"I", I.str()}, {"j", j}, {"s", s}}, [tw, I, j, s] { return from_op(check_tq_super(I, j, s, tw)); });
    } else if (suite == "qq") {
        for (IndexSet I : sets)
            for (int a = 1; a <= n; ++a)
                for (int b = a + 1; b <= n; ++b)
                    if (!I.contains(a) && !I.contains(b))
                        add("qq", ojson{{"I", I.str()}, {"i", a}, {"j", b}}, [tw, I, a, b] { return from_op(check_qq_super(I, a, b, tw)); });
    } else if (suite == "hirota") {
        for (IndexSet I : sets)
            for (int a = 1; a <= p.aMax; ++a)
                for (int s = 1; s <= p.sMax; ++s)
                    add("hirota", ojson{{"I", I.str()}, {"a", a}, {"s", s}}, [tw, I, a, s] { return from_op(check_hirota(I, a, s, tw)); });
    } else if (suite == "bt") {
        for (IndexSet I : sets)
            for (int j = 1; j <= tw.K; ++j)
                if (!I.contains(j))
                    for (int a = 0; a <= p.aMax; ++a)
                        for (int s = 0; s <= p.sMax; ++s)
                            add("bt", ojson{{"I", I.str()}, {"j", j}, {"a", a}, {"s", s}}, [tw, I, j, a, s] {
                                auto [r1, r2] = check_bt(I, j, a, s, tw);
                                return Outcome{r1.is_zero() && r2.is_zero(), r1.is_zero() ? r2.max_residual() : r1.max_residual()};
                            });
    } else if (suite == "br") {
        for (const auto& lam : diagrams(p.aMax, p.sMax))
            add("br", ojson{{"lambda", lam.str()}}, [tw, lam] { return from_op(check_br(lam, tw)); });
        auto z = fresh_points(rng, tw, 3);
        for (IndexSet I : subsets(3)) {
            if (I.size() > 1) continue;
            for (int i = 1; i <= 3; ++i)
                for (int j = i + 1; j <= 3; ++j)
                    if (!I.contains(i) && !I.contains(j))
                        add("plucker", ojson{{"z", rats_str(z)}, {"I", I.str()}, {"i", i}, {"j", j}},
                            [tw, z, I, i, j] { return from_op(check_plucker(tw, z, I, i, j)); });
        }
        for (int m = 1; m <= 3; ++m)
            add("master_det", ojson{{"z", rats_str(z)}, {"n", m}}, [tw, z, m] { return from_op(check_master_det(tw, z, m)); });
    } else if (suite == "wronskian") {
        const std::uint32_t bos = IndexSet::full(tw.K).mask();
        for (IndexSet I : sets)
            for (IndexSet J : sets)
                if (J.size() > 0 && (I.mask() & J.mask()) == 0 && (J.mask() & ~bos) == 0)
                    add("wronskian", ojson{{"I", I.str()}, {"J", J.str()}},
                        [tw, I, J] { return from_op(wronskian_q(I, J, tw) - q_operator(IndexSet(I.mask() | J.mask()), tw)); });
    } else if (suite == "comm") {
        std::vector<std::function<TensorOperator()>> makers;
        std::vector<std::pair<IndexSet, int>> labels;
        for (IndexSet I : sets)
            for (int s = 0; s <= 2; ++s) {
                makers.push_back([tw, I, s] { return t_sym(I, s, tw); });
                labels.emplace_back(I, s);
            }
        auto lazy = std::make_shared<LazyOps>(std::move(makers));
        keep.push_back(lazy);
        const Rat v = rng.small_rat();
        for (std::size_t a = 0; a < lazy->size(); ++a)
            for (std::size_t b = a; b < lazy->size(); ++b)
                add("comm", ojson{{"A", labels[a].first.str() + "^" + std::to_string(labels[a].second)},
                                  {"B", labels[b].first.str() + "^" + std::to_string(labels[b].second)}, {"v", v.get_str()}},
                    [lazy, a, b, v] { return from_op(op_comm(lazy->get(a), lazy->get(b).shift(v))); });
        auto pts = fresh_points(rng, tw, 3);
        add("comm_w", ojson{{"t", rats_str(pts)}, {"v", v.get_str()}}, [tw, pts, v] {
            return from_op(check_commutativity({WFactor{pts[0], 1}}, {WFactor{pts[1], 1}, WFactor{pts[2], -1}}, v, tw));
        });
    } else if (suite == "removal") {
        if (tw.M != 0) return;
        RatMatrix omega;
        for (;;) {
            omega.assign(static_cast<std::size_t>(tw.K), std::vector<Rat>(static_cast<std::size_t>(tw.K), Rat(0)));
            for (auto& row : omega)
                for (auto& e : row) e = Rat(static_cast<long>(rng.below(7)) - 3);
            if (rat_inverse(omega)) break;
        }
        for (int j = 1; j <= tw.K; ++j)
            for (int m = 0; m < tw.sites(); ++m)
                add("removal", ojson{{"j", j}, {"m", m}, {"n", tw.sites() - m}},
                    [tw, omega, j, m] { return from_op(check_removal(m, tw.sites() - m, j, tw, omega)); });
    } else if (suite == "super") {
        if (tw.M == 0) return;
        for (IndexSet I : sets) {
            for (int i = 1; i <= tw.K; ++i)
                for (int l = tw.K + 1; l <= n; ++l)
                    if (!I.contains(i) && !I.contains(l))
                        add("bosonization", ojson{{"I", I.str()}, {"i", i}, {"l", l}},
                            [tw, I, i, l] { return from_op(check_bosonization(I, i, l, tw)); });
            for (const auto& lam : diagrams(3, 2))
                add("fat_hook", ojson{{"I", I.str()}, {"lambda", lam.str()}}, [tw, I, lam] {
                    const bool ok = check_fat_hook(lam, I, tw);
                    return Outcome{ok, ok ? "0" : "vanishing does not match the fat-hook condition"};
                });
        }
    } else if (suite == "series") {
        for (const auto& path : all_paths(n, 6))
            add("series", ojson{{"path", path.str()}}, [tw, path, sMax = p.sMax] {
                auto rebuilt = gen_series_t(path, tw, sMax);
                auto direct = t_series(IndexSet::full(tw.dim()), tw, sMax);
                for (int s = 0; s <= sMax; ++s) {
                    TensorOperator r = rebuilt[static_cast<std::size_t>(s)] - direct[static_cast<std::size_t>(s)];
                    if (!r.is_zero()) return from_op(r);
                }
                return Outcome{true, "0"};
            });
    } else {
        throw ConfigError("unknown suite: " + suite);
    }
}

}  // namespace

std::vector<CheckRecord> run_suite(const std::string& suite, const SuiteParams& p) {
    if (p.draws < 1) throw ConfigError("draws must be positive");
    std::vector<Task> tasks;
    std::vector<std::shared_ptr<LazyOps>> keep;
    for (int d = 0; d < p.draws; ++d) {
        SplitMix64 rng(p.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(d) * 0xBF58476D1CE4E5B9ULL);
        Twist tw = random_twist(rng, p.K, p.M, p.N);
        if (p.x) tw.xi = *p.x;
        if (p.theta) tw.theta = *p.theta;
        tw.validate();
        check_size(tw);
        SplitMix64 local(rng.next() ^ suite_salt(suite));
        build_tasks(suite, p, d, tw, local, tasks, keep);
    }
    std::vector<CheckRecord> out(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t k) {
        CheckRecord& r = out[k];
        r.suite = suite;
        r.check = tasks[k].check;
        r.params = tasks[k].params;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            Outcome o = tasks[k].fn();
            r.residual_zero = o.zero;
            r.max_residual_poly = o.residual;
        } catch (const std::exception& e) {
            r.residual_zero = false;
            r.max_residual_poly = "";
            r.error = e.what();
        }
        r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    });
    return out;
}

ojson record_json(const CheckRecord& r, bool timing) {
    ojson j;
    j["suite"] = r.suite;
    j["check"] = r.check;
    j["params"] = r.params;
    j["residual_zero"] = r.residual_zero;
    j["max_residual_poly"] = r.max_residual_poly;
    if (!r.error.empty()) j["error"] = r.error;
    if (timing) j["wall_ms"] = r.wall_ms;
    return j;
}

namespace {

struct Options {
    int K = 2, M = 0, N = 2;
    std::vector<std::string> x, theta;
    std::uint64_t seed = 1;
    bool json = false, timing = false;
    int jobs = 0;
    std::string config, out;
    std::vector<std::string> suites{"all"};
    int draws = 3;
    std::vector<std::string> paths;
    std::string u0 = "1/3";
    double tol = 1e-9;
    int retries = 5;
    std::string csv;
    std::string highlight;
};

std::string json_scalar(const ojson& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
}

std::vector<std::string> json_list(const ojson& v) {
    std::vector<std::string> out;
    if (v.is_array())
        for (const auto& e : v) out.push_back(json_scalar(e));
    else
        out.push_back(json_scalar(v));
    return out;
}

// file values fill every option the command line left unset
void apply_config(CLI::App& sub, Options& o) {
    std::ifstream in(o.config);
    if (!in) throw ConfigError("cannot read config file " + o.config);
    ojson doc;
    try {
        doc = ojson::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, val] : doc.items()) {
        CLI::Option* opt = nullptr;
        try {
            opt = sub.get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw ConfigError("unknown config key: " + key);
        }
        if (opt->count() > 0) continue;
        auto strs = json_list(val);
        if (opt->get_type_size() == 0) {   // flag
            if (strs.size() != 1 || (strs[0] != "true" && strs[0] != "false")) throw ConfigError("config key " + key + " must be a boolean");
            if (strs[0] == "false") continue;
            strs = {"true"};
        }
        opt->clear();
        for (const auto& s : strs) opt->add_result(s);
        opt->run_callback();
    }
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--K", o.K, "bosonic rank");
    sub->add_option("--M", o.M, "fermionic rank");
    sub->add_option("--N", o.N, "number of sites");
    sub->add_option("--x", o.x, "twist eigenvalue (repeat; bosonic first), p/q");
    sub->add_option("--theta", o.theta, "inhomogeneity per site (repeat), p/q");
    sub->add_option("--seed", o.seed, "PRNG seed");
    sub->add_flag("--json", o.json, "machine-readable output");
    sub->add_flag("--timing", o.timing, "include wall-clock times");
    sub->add_option("--jobs", o.jobs, "worker threads (default: BETHE_FORGE_JOBS or hardware)");
    sub->add_option("--config", o.config, "JSON config file; flags take precedence");
    sub->add_option("--out", o.out, "write the main output to this file");
}

std::vector<Rat> parse_rats(const std::vector<std::string>& v) {
    std::vector<Rat> out;
    for (const auto& s : v) out.push_back(parse_rat(s));
    return out;
}

ojson config_json(const Options& o, const std::string& cmd) {
    ojson c;
    c["K"] = o.K;
    c["M"] = o.M;
    c["N"] = o.N;
    c["x"] = o.x;
    c["theta"] = o.theta;
    c["seed"] = o.seed;
    if (cmd == "verify") {
        c["suites"] = o.suites;
        c["draws"] = o.draws;
    }
    if (cmd == "spectrum") {
        c["paths"] = o.paths;
        c["u0"] = o.u0;
        c["tol"] = o.tol;
        c["retries"] = o.retries;
    }
    return c;
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
    if (o.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw ConfigError("cannot write " + o.out);
    f << text;
}

Twist twist_from(const Options& o) {
    if (o.K < 1 || o.M < 0 || o.N < 1) throw ConfigError("need K >= 1, M >= 0, N >= 1");
    SplitMix64 rng(o.seed);
    Twist tw = random_twist(rng, o.K, o.M, o.N);
    if (!o.x.empty()) tw.xi = parse_rats(o.x);
    if (!o.theta.empty()) tw.theta = parse_rats(o.theta);
    if (static_cast<int>(tw.theta.size()) != o.N)
        throw ConfigError("expected " + std::to_string(o.N) + " theta values, got " + std::to_string(tw.theta.size()));
    tw.validate();
    check_size(tw);
    return tw;
}

int cmd_verify(const Options& o, std::ostream& out) {
    std::vector<std::string> suites;
    for (const auto& s : o.suites) {
        if (s == "all") {
            for (const auto& n : suite_names())
                if (std::find(suites.begin(), suites.end(), n) == suites.end()) suites.push_back(n);
        } else if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end()) {
            throw ConfigError("unknown suite: " + s);
        } else if (std::find(suites.begin(), suites.end(), s) == suites.end()) {
            suites.push_back(s);
        }
    }
    SuiteParams p;
    p.K = o.K;
    p.M = o.M;
    p.N = o.N;
    p.draws = o.draws;
    p.seed = o.seed;
    p.timing = o.timing;
    if (o.K < 1 || o.M < 0 || o.N < 1) throw ConfigError("need K >= 1, M >= 0, N >= 1");
    if (!o.x.empty()) p.x = parse_rats(o.x);
    if (!o.theta.empty()) {
        p.theta = parse_rats(o.theta);
        if (static_cast<int>(p.theta->size()) != o.N) throw ConfigError("expected " + std::to_string(o.N) + " theta values");
    }
    if (p.x) {
        Twist probe{o.K, o.M, *p.x, std::vector<Rat>(static_cast<std::size_t>(o.N), Rat(0))};
        probe.validate();
    }
    const auto t0 = std::chrono::steady_clock::now();
    ojson results = ojson::array();
    ojson per_suite = ojson::object();
    int checks = 0, failed = 0;
    std::ostringstream text;
    for (const auto& s : suites) {
        auto recs = run_suite(s, p);
        int f = 0;
        for (const auto& r : recs) {
            if (!r.residual_zero) ++f;
            results.push_back(record_json(r, o.timing));
        }
        checks += static_cast<int>(recs.size());
        failed += f;
        per_suite[s] = ojson{{"checks", recs.size()}, {"failed", f}};
        text << "suite " << s << ": " << recs.size() << " checks, " << f << " failed\n";
        for (const auto& r : recs)
            if (!r.residual_zero)
                text << "  FAIL " << r.check << " " << r.params.dump() << " " << (r.error.empty() ? r.max_residual_poly : r.error) << "\n";
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (o.json) {
        ojson j;
        j["schema"] = kSchemaVersion;
        j["command"] = "verify";
        j["config"] = config_json(o, "verify");
        j["results"] = results;
        ojson sum;
        sum["checks"] = checks;
        sum["failed"] = failed;
        sum["suites"] = per_suite;
        sum["ok"] = failed == 0;
        if (o.timing) sum["wall_ms"] = ms;
        j["summary"] = sum;
        emit(o, out, j.dump(2) + "\n");
    } else {
        text << "verify: " << checks << " checks, " << failed << " failed" << (failed ? " FAILED" : " OK") << "\n";
        if (o.timing) text << "wall_ms: " << ms << "\n";
        emit(o, out, text.str());
    }
    return failed == 0 ? 0 : 1;
}

int cmd_spectrum(const Options& o, std::ostream& out) {
    Twist tw = twist_from(o);
    std::vector<NestingPath> paths;
    for (const auto& s : o.paths) paths.push_back(NestingPath::parse(s, tw.dim()));
    if (paths.empty()) {
        std::vector<int> order(static_cast<std::size_t>(tw.dim()));
        for (int k = 0; k < tw.dim(); ++k) order[static_cast<std::size_t>(k)] = k + 1;
        paths.push_back(NestingPath::from_order(order));
        std::reverse(order.begin(), order.end());
        if (tw.dim() > 1) paths.push_back(NestingPath::from_order(order));
    }
    BetheOptions bo;
    bo.u0 = parse_rat(o.u0);
    bo.tol = o.tol;
    bo.retries = o.retries;
    bo.seed = o.seed;
    if (!(bo.tol > 0)) throw ConfigError("tol must be positive");
    if (bo.retries < 0) throw ConfigError("retries must be nonnegative");
    const auto t0 = std::chrono::steady_clock::now();
    SpectrumReport rep = run_spectrum(tw, paths, bo);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (!o.csv.empty()) {
        std::ofstream f(o.csv);
        if (!f) throw ConfigError("cannot write " + o.csv);
        f << roots_csv(rep);
    }
    ojson body = spectrum_json(rep);
    if (o.json) {
        ojson j;
        j["schema"] = kSchemaVersion;
        j["command"] = "spectrum";
        j["graded"] = tw.M > 0;
        for (auto& [k, v] : body.items()) j[k] = v;
        if (o.timing) j["wall_ms"] = ms;
        emit(o, out, j.dump(2) + "\n");
    } else {
        std::ostringstream t;
        const auto& sum = body["summary"];
        t << "spectrum: K=" << tw.K << " M=" << tw.M << " N=" << tw.sites() << (tw.M > 0 ? " (graded)" : "") << "\n";
        t << "twist x=" << rats_str(tw.xi) << " theta=" << rats_str(tw.theta) << "\n";
        for (const auto& p : paths) t << "path " << p.str() << "\n";
        t << "states: " << rep.basis.states.size() << "\n";
        for (const auto& st : body["states"]) {
            t << "state " << st["id"].get<int>() << " weight " << st["weight"].dump() << "\n";
            for (const auto& q : st["q"]) t << "  Q_" << q["I"].get<std::string>() << " degree " << q["degree"].get<int>() << " roots " << q["roots"].dump() << "\n";
        }
        t << "bae: " << (sum["bae_pass"].get<bool>() ? "pass" : "FAIL") << " (max residual " << sum["bae_max_residual"].get<double>() << ")\n";
        t << "T1 rebuild: " << (sum["t1_pass"].get<bool>() ? "pass" : "FAIL") << " (max rel error " << sum["t1_max_rel_error"].get<double>() << ")\n";
        t << "path independent: " << (rep.path_independent ? "yes" : "NO") << "\n";
        t << "degree law: " << (rep.degree_law ? "yes" : "NO") << "\n";
        if (o.timing) t << "wall_ms: " << ms << "\n";
        emit(o, out, t.str());
    }
    return rep.ok() ? 0 : 1;
}

NestingPath highlight_path(const std::string& text, int n) {
    if (text.find(',') == std::string::npos && text.find('>') != std::string::npos) return NestingPath::parse(text, n);
    std::vector<IndexSet> asc{IndexSet{}};
    std::string cur;
    for (char ch : text + ",") {
        if (ch == ',') {
            asc.push_back(IndexSet::parse(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    std::reverse(asc.begin(), asc.end());
    if (asc.front() != IndexSet::full(n)) throw ConfigError("highlight path must end at the full set");
    return NestingPath(asc);
}

int cmd_hasse(const Options& o, std::ostream& out) {
    if (o.K < 0 || o.M < 0) throw ConfigError("need K, M >= 0");
    std::optional<NestingPath> path;
    if (!o.highlight.empty()) path = highlight_path(o.highlight, o.K + o.M);
    const std::string dot = hasse_export(o.K, o.M, path ? &*path : nullptr);
    const int n = o.K + o.M;
    if (o.json) {
        ojson j;
        j["schema"] = kSchemaVersion;
        j["command"] = "hasse";
        j["K"] = o.K;
        j["M"] = o.M;
        j["nodes"] = 1 << n;
        j["edges"] = n * (1 << (n - 1));
        if (path) j["highlight"] = path->str();
        if (!o.out.empty()) {
            std::ofstream f(o.out);
            if (!f) throw ConfigError("cannot write " + o.out);
            f << dot;
            j["out"] = o.out;
        } else {
            j["dot"] = dot;
        }
        out << j.dump(2) << "\n";
    } else {
        emit(o, out, dot);
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Exact T- and Q-operators of twisted rational spin chains"};
    app.require_subcommand(1);
    auto* verify = app.add_subcommand("verify", "check operator identities on seeded draws");
    auto* spectrum = app.add_subcommand("spectrum", "Q-functions, Bethe roots and Bethe-equation residuals");
    auto* hasse = app.add_subcommand("hasse", "Graphviz Hasse diagram of the Q-operators");
    for (auto* sub : {verify, spectrum, hasse}) add_common(sub, o);
    verify->add_option("--suite", o.suites, "suite name or 'all' (repeatable)");
    verify->add_option("--draws", o.draws, "seeded draws per suite");
    spectrum->add_option("--path", o.paths, "nesting path like 12>1> (repeatable)");
    spectrum->add_option("--u0", o.u0, "evaluation point for diagonalization, p/q");
    spectrum->add_option("--tol", o.tol, "numerical tolerance");
    spectrum->add_option("--retries", o.retries, "retries on degenerate combinations");
    spectrum->add_option("--csv", o.csv, "write Bethe roots as CSV");
    hasse->add_option("--highlight-path", o.highlight, "chain like 2,23,123,1234");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }
    CLI::App* sub = verify->parsed() ? verify : spectrum->parsed() ? spectrum : hasse;
    try {
        if (!o.config.empty()) apply_config(*sub, o);
        if (o.jobs < 0) throw ConfigError("jobs must be nonnegative");
        if (o.jobs > 0) set_jobs(o.jobs);
        if (sub == verify) return cmd_verify(o, out);
        if (sub == spectrum) return cmd_spectrum(o, out);
        return cmd_hasse(o, out);
    } catch (const DegenerateSpectrum& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace bf
