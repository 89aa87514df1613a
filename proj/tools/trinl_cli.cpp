// trinl: closed-form bounds, optimization, thresholds, sweeps and polytope
// membership for three-qubit Bell-type operators.
//
// Exit codes: 0 success, 2 invalid input, 3 non-convergence or no crossing.

#include "trinl/analysis.hpp"
#include "trinl/polytope.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace trinl;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

// Ordered key/value output, printed as key=value lines or a JSON object.
class Report {
  public:
    void add(const std::string& key, double v) { items_.emplace_back(key, Value{format_number(v), true}); }
    void add(const std::string& key, bool v) { items_.emplace_back(key, Value{v ? "true" : "false", true}); }
    void add(const std::string& key, int v) { items_.emplace_back(key, Value{std::to_string(v), true}); }
    void add(const std::string& key, const std::string& v) { items_.emplace_back(key, Value{v, false}); }
    void add(const std::string& key, const char* v) { add(key, std::string(v)); }

    void print(bool json) const {
        if (!json) {
            for (const auto& [k, v] : items_) std::cout << k << '=' << v.text << '\n';
            return;
        }
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (const auto& [k, v] : items_)
            j[k] = v.literal ? nlohmann::ordered_json::parse(v.text) : nlohmann::ordered_json(v.text);
        std::cout << j.dump(2) << '\n';
    }

  private:
    struct Value {
        std::string text;
        bool literal;  // number or boolean
    };
    std::vector<std::pair<std::string, Value>> items_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// State selection shared by several verbs.
struct StateArgs {
    std::string family;
    std::string state_file;
    std::optional<double> eta, tau, c12sq, l0, l3, l4, p;
    int k = 1;
    int index = 1;
    std::string sign = "+";

    void attach(CLI::App* app) {
        app->add_option("--family", family, "state family (gghz, ms, ext_s, ghz, w, wtilde, rho2..rho8, lambda)");
        app->add_option("--state", state_file, "JSON state document");
        app->add_option("--eta", eta, "GGHZ / MS parameter (radians)");
        app->add_option("--tau", tau, "three-tangle (gghz, ms; ext_s with --c12sq)");
        app->add_option("--c12sq", c12sq, "squared concurrence of qubits 1 and 2");
        app->add_option("--l0", l0, "extended GHZ coefficient of |000>");
        app->add_option("--l3", l3, "extended GHZ coefficient of |110>");
        app->add_option("--l4", l4, "extended GHZ coefficient of |111>");
        app->add_option("--p", p, "mixing weight of the mixed families");
        app->add_option("--k", k, "rho3 denominator");
        app->add_option("--index", index, "Lambda basis index 1..4");
        app->add_option("--sign", sign, "Lambda basis sign, + or -");
    }

    FamilyParams params() const {
        const auto f = parse_family(family);
        if (!f) throw InvalidArgument("unknown family: " + family);
        FamilyParams fp;
        fp.family = *f;
        fp.k = k;
        fp.basis_index = index;
        if (sign != "+" && sign != "-") throw InvalidArgument("--sign must be + or -");
        fp.plus = sign == "+";
        switch (*f) {
            case Family::GGHZ:
            case Family::MS:
                if (eta) {
                    fp.eta = *eta;
                } else if (tau) {
                    if (!(*tau >= 0.0 && *tau <= 1.0)) throw InvalidArgument("tau must lie in [0, 1]");
                    fp.eta = *f == Family::GGHZ ? 0.5 * std::asin(std::sqrt(*tau)) : std::asin(std::sqrt(*tau));
                } else {
                    throw InvalidArgument("--eta or --tau is required for " + family);
                }
                break;
            case Family::EXT_S:
                if (l0 && l3 && l4) {
                    fp.lambdas = {*l0, *l3, *l4};
                } else if (tau && c12sq) {
                    fp.lambdas = ext_s_lambdas(*tau, *c12sq);
                } else {
                    throw InvalidArgument("ext_s needs --l0 --l3 --l4 or --tau --c12sq");
                }
                break;
            case Family::RHO2:
            case Family::RHO3:
            case Family::RHO4:
            case Family::RHO5:
            case Family::RHO6:
            case Family::RHO7:
            case Family::RHO8:
                if (!p) throw InvalidArgument("--p is required for " + family);
                fp.p = *p;
                break;
            default: break;
        }
        return fp;
    }

    struct Loaded {
        DensityMatrix rho;
        std::optional<StateVector> pure;
        std::optional<FamilyParams> fp;
    };

    Loaded load() const {
        if (family.empty() == state_file.empty()) throw InvalidArgument("give exactly one of --family or --state");
        if (!state_file.empty()) {
            StateDocument doc = parse_state_document(read_file(state_file));
            if (std::abs(doc.input_norm - 1.0) > 1e-10)
                std::cerr << "note: amplitudes rescaled from norm " << format_number(doc.input_norm) << '\n';
            return {doc.rho, doc.pure, std::nullopt};
        }
        const FamilyParams fp = params();
        if (fp.family == Family::MS && !ms_in_nominal_range(fp.eta))
            std::cerr << "note: MS parameter beyond pi/4\n";
        std::optional<StateVector> pure;
        if (is_pure_family(fp.family)) pure = pure_family(fp);
        return {family_state(fp), pure, fp};
    }
};

OperatorKind operator_arg(const std::string& name) {
    const auto op = parse_operator(name);
    if (!op) throw InvalidArgument("unknown operator: " + name);
    return *op;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("not a number: " + item);
        }
        if (used != item.size()) throw InvalidArgument("not a number: " + item);
        out.push_back(v);
    }
    return out;
}

std::string angles_text(const MeasurementScenario& sc) {
    std::string s;
    for (double a : sc.angles()) s += (s.empty() ? "" : ",") + format_number(a);
    return s;
}

void add_violation(Report& r, const ViolationReport& v, const BellOperator& op) {
    r.add("operator", op.name);
    r.add("value", v.value);
    r.add("classical_bound", v.classical_bound);
    r.add("violated", v.violated);
    r.add("converged", v.converged);
    r.add("restart_spread", v.restart_spread);
    r.add("restarts", v.restarts_used);
    r.add("angles", angles_text(v.scenario));
}

const char* model_name(ModelKind k) {
    switch (k) {
        case ModelKind::FULLY_LOCAL: return "local";
        case ModelKind::NS2: return "ns2";
        case ModelKind::S2: return "s2";
    }
    return "?";
}

const char* membership_name(MembershipStatus s) {
    switch (s) {
        case MembershipStatus::Inside: return "inside";
        case MembershipStatus::Outside: return "outside";
        case MembershipStatus::NumericalFailure: return "numerical_failure";
    }
    return "?";
}

std::uint64_t seed_from_env() {
    const char* env = std::getenv("NL_SEED");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw InvalidArgument("NL_SEED must be a non-negative integer");
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-qubit Bell-type operators: bounds, optimization and hybrid-model membership"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed_opt;
    bool json = false;
    int restarts = 64;
    int threads = 0;
    app.add_option("--seed", seed_opt, "random seed (default: NL_SEED or 1)");
    app.add_flag("--json", json, "print a JSON document instead of key=value lines");
    app.add_option("--restarts", restarts, "optimizer restarts")->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "worker threads for restarts (0: all cores)")->check(CLI::NonNegativeNumber);

    // bound
    auto* bound = app.add_subcommand("bound", "closed-form maximum of an operator");
    StateArgs bound_state;
    std::string bound_op = "ns99";
    bool bound_single = false;
    bound->add_option("--family", bound_state.family, "gghz, ms, ext_s, ghz, rho4..rho8");
    bound->add_option("--operator", bound_op, "ns99, svetlichny or chsh");
    bound->add_option("--eta", bound_state.eta, "GGHZ / MS parameter");
    bound->add_option("--tau", bound_state.tau, "three-tangle");
    bound->add_option("--c12sq", bound_state.c12sq, "squared concurrence of qubits 1 and 2");
    bound->add_option("--l0", bound_state.l0);
    bound->add_option("--l3", bound_state.l3);
    bound->add_option("--l4", bound_state.l4);
    bound->add_option("--p", bound_state.p, "mixing weight");
    bound->add_flag("--single-radical", bound_single, "rho6: use the single-radical variant");

    // optimize
    auto* opt = app.add_subcommand("optimize", "maximize an operator over measurement angles");
    StateArgs opt_state;
    std::string opt_op = "ns99";
    opt_state.attach(opt);
    opt->add_option("--operator", opt_op, "ns99, svetlichny or chsh (two-qubit input)");

    // threshold
    auto* thr = app.add_subcommand("threshold", "smallest mixing weight p that violates an operator");
    std::string thr_family;
    std::string thr_op = "ns99";
    ThresholdQuery thr_q = table_query();
    std::optional<double> thr_target;
    thr->add_option("--family", thr_family, "rho2..rho8")->required();
    thr->add_option("--operator", thr_op, "ns99 or svetlichny");
    thr->add_option("--k", thr_q.family.k, "rho3 denominator");
    thr->add_option("--lo", thr_q.lo, "lower end of the bracket");
    thr->add_option("--hi", thr_q.hi, "upper end of the bracket");
    thr->add_option("--tol", thr_q.tol, "bisection tolerance in p");
    thr->add_option("--target", thr_target, "value to cross (default: classical bound)");
    thr->add_option("--root-restarts", thr_q.root_restarts, "restarts once the bracket is narrow");

    // visibility
    auto* vis = app.add_subcommand("visibility", "white-noise visibility threshold with numeric confirmation");
    StateArgs vis_state;
    std::string vis_op = "ns99";
    double vis_delta = 0.01;
    vis_state.attach(vis);
    vis->add_option("--operator", vis_op, "ns99 or svetlichny");
    vis->add_option("--delta", vis_delta, "offset of the confirmation points")->check(CLI::Range(1e-6, 0.5));

    // sweep
    auto* sweep = app.add_subcommand("sweep", "CSV table along one family parameter");
    std::string sweep_family;
    SweepSpec sweep_spec;
    std::string sweep_columns = "ns_bound,svet_bound";
    std::string sweep_out;
    sweep->add_option("--family", sweep_family, "gghz, ms, ext_s or rho2..rho8")->required();
    sweep->add_option("--param", sweep_spec.parameter, "eta, tau or p")->required();
    sweep->add_option("--from", sweep_spec.from)->required();
    sweep->add_option("--to", sweep_spec.to)->required();
    sweep->add_option("--steps", sweep_spec.steps);
    sweep->add_option("--c12sq", sweep_spec.c12sq, "fixed C12^2 for ext_s tau sweeps");
    sweep->add_option("--k", sweep_spec.family.k, "rho3 denominator");
    sweep->add_option("--columns", sweep_columns,
                      "comma list of ns_bound, svet_bound, ns_opt, svet_opt, tau, c12sq, delta_d, visibility_ns, "
                      "visibility_svet");
    sweep->add_option("--out", sweep_out, "write the CSV here instead of stdout");

    // tables
    auto* tables = app.add_subcommand("tables", "recompute the reference violation thresholds");
    int table_which = 1;
    std::string table_format = "markdown";
    tables->add_option("--which", table_which, "1 or 2")->check(CLI::IsMember({1, 2}));
    tables->add_option("--format", table_format, "markdown or csv")->check(CLI::IsMember({"markdown", "csv"}));

    // membership
    auto* mem = app.add_subcommand("membership", "LP membership of a behavior in the hybrid models");
    StateArgs mem_state;
    std::string mem_behavior;
    std::string mem_angles;
    std::string mem_optimal_for;
    std::string mem_model;
    std::string mem_write;
    mem_state.attach(mem);
    mem->add_option("--behavior", mem_behavior, "behavior table (x y z a b c probability rows)");
    mem->add_option("--angles", mem_angles, "12 comma-separated angles (radians) for a state input");
    mem->add_option("--optimal-for", mem_optimal_for, "use the optimizer's scenario for this operator");
    mem->add_option("--model", mem_model, "local, ns2 or s2 (default: all)");
    mem->add_option("--write-behavior", mem_write, "export the behavior table");

    // channel
    auto* chan = app.add_subcommand("channel", "per-qubit noise, then optimize both operators");
    StateArgs chan_state;
    std::string chan_kind = "depolarize";
    std::string chan_strengths;
    bool chan_examples = false;
    chan_state.attach(chan);
    chan->add_option("--channel", chan_kind, "depolarize or damp")->check(CLI::IsMember({"depolarize", "damp"}));
    chan->add_option("--strengths", chan_strengths, "three comma-separated strengths for qubits 1, 2, 3");
    chan->add_flag("--examples", chan_examples, "evaluate the four stored noisy examples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        OptimizeOptions oo;
        oo.seed = seed_opt ? *seed_opt : seed_from_env();
        oo.restarts = restarts;
        oo.threads = threads;
        Report rep;

        if (*bound) {
            const OperatorKind op = operator_arg(bound_op);
            double value = 0.0;
            if (op == OperatorKind::CHSH) {
                if (!bound_state.c12sq) throw InvalidArgument("chsh bound needs --c12sq");
                value = chsh_pure_max(*bound_state.c12sq);
            } else {
                if (bound_state.family.empty()) throw InvalidArgument("--family is required");
                const FamilyParams fp = bound_state.params();
                if (fp.family == Family::EXT_S && bound_state.tau && bound_state.c12sq) {
                    value = op == OperatorKind::NS99 ? bound_b5(*bound_state.tau, *bound_state.c12sq)
                                                     : bound_b4(*bound_state.tau, *bound_state.c12sq);
                } else if (fp.family == Family::RHO6 && bound_single && op == OperatorKind::NS99) {
                    value = bound_table2_single_radical(Table2Family::RHO6, fp.p);
                } else {
                    const auto b = closed_form_bound(fp, op);
                    if (!b) throw InvalidArgument("no closed form for this family and operator");
                    value = *b;
                }
            }
            if (json) {
                rep.add("bound", value);
                rep.print(true);
            } else {
                std::cout << format_number(value) << '\n';
            }
            return 0;
        }

        if (*opt) {
            const BellOperator& op = bell_operator(operator_arg(opt_op));
            ViolationReport v;
            if (op.parties == 2) {
                // cos a|00> + sin a|11> with concurrence sin 2a.
                if (!opt_state.c12sq || !(*opt_state.c12sq >= 0.0 && *opt_state.c12sq <= 1.0))
                    throw InvalidArgument("chsh takes --c12sq in [0, 1]");
                const double a = 0.5 * std::asin(std::sqrt(*opt_state.c12sq));
                const StateVector psi = StateVector::from_terms(4, {{0, std::cos(a)}, {3, std::sin(a)}});
                v = optimize_operator(DensityMatrix(psi), op, oo);
            } else {
                const auto loaded = opt_state.load();
                v = optimize_operator(loaded.rho, op, oo);
            }
            add_violation(rep, v, op);
            rep.print(json);
            return v.converged ? 0 : kExitNumerical;
        }

        if (*thr) {
            const auto f = parse_family(thr_family);
            if (!f || is_pure_family(*f)) throw InvalidArgument("threshold needs a mixed family (rho2..rho8)");
            thr_q.family.family = *f;
            thr_q.op = operator_arg(thr_op);
            thr_q.target = thr_target;
            thr_q.restarts = restarts;
            thr_q.seed = oo.seed;
            thr_q.threads = threads;
            const ThresholdResult r = find_threshold(thr_q);
            rep.add("family", thr_family);
            rep.add("operator", bell_operator(thr_q.op).name);
            rep.add("target", r.target);
            rep.add("p", r.p);
            rep.add("tolerance", thr_q.tol);
            rep.add("monotone", r.monotone);
            rep.add("evaluations", r.evaluations);
            rep.print(json);
            return 0;
        }

        if (*vis) {
            const auto loaded = vis_state.load();
            if (!loaded.fp || !loaded.pure) throw InvalidArgument("visibility needs --family gghz, ghz, ms or ext_s");
            const auto vf = visibility_family(loaded.fp->family);
            if (!vf) throw InvalidArgument("visibility needs --family gghz, ghz, ms or ext_s");
            const OperatorKind op = operator_arg(vis_op);
            const VisibilityCheck c = check_visibility(*loaded.pure, *vf, op, vis_delta, oo);
            rep.add("operator", bell_operator(op).name);
            if (!c.alpha) {
                rep.add("alpha", "none");
                rep.print(json);
                return kExitNumerical;
            }
            rep.add("alpha", *c.alpha);
            rep.add("value_below", c.below);
            rep.add("value_above", c.above);
            rep.add("violated_below", c.below_violated);
            rep.add("violated_above", c.above_violated);
            rep.add("confirmed", c.confirmed());
            rep.print(json);
            return c.confirmed() ? 0 : kExitNumerical;
        }

        if (*sweep) {
            const auto f = parse_family(sweep_family);
            if (!f) throw InvalidArgument("unknown family: " + sweep_family);
            sweep_spec.family.family = *f;
            if (*f == Family::GGHZ || *f == Family::MS) sweep_spec.family.eta = 0.0;
            std::stringstream ss(sweep_columns);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto c = parse_sweep_column(item);
                if (!c) throw InvalidArgument("unknown column: " + item);
                sweep_spec.columns.push_back(*c);
            }
            sweep_spec.optimize = oo;
            const std::string csv = run_sweep(sweep_spec);
            if (sweep_out.empty()) {
                std::cout << csv;
            } else {
                std::ofstream out(sweep_out);
                if (!out) throw InvalidArgument("cannot write " + sweep_out);
                out << csv;
            }
            return 0;
        }

        if (*tables) {
            ThresholdQuery base = table_query();
            base.restarts = restarts;
            base.seed = oo.seed;
            base.threads = threads;
            const auto cells = reproduce_table(table_which, base);
            const bool md = table_format == "markdown";
            std::cout << (md ? "| state | operator | reference | recomputed | abs diff | tau>0 |\n|---|---|---|---|---|---|\n"
                             : "state,operator,reference,recomputed,abs_diff,tau_positive\n");
            for (const auto& c : cells) {
                const std::string name = bell_operator(c.op).name;
                const std::string tau = format_number(c.tau_positive) + " (reference constant, not recomputed)";
                if (md) {
                    std::cout << "| " << c.state << " | " << name << " | " << format_number(c.reference) << " | "
                              << format_number(c.recomputed) << " | " << format_number(c.difference()) << " | " << tau
                              << " |\n";
                } else {
                    std::cout << c.state << ',' << name << ',' << format_number(c.reference) << ','
                              << format_number(c.recomputed) << ',' << format_number(c.difference()) << ",\"" << tau
                              << "\"\n";
                }
            }
            return 0;
        }

        if (*mem) {
            Behavior beh;
            if (!mem_behavior.empty()) {
                if (!mem_state.family.empty() || !mem_state.state_file.empty())
                    throw InvalidArgument("give either --behavior or a state");
                beh = read_behavior(read_file(mem_behavior));
            } else {
                const auto loaded = mem_state.load();
                if (loaded.rho.dim() != 8) throw InvalidArgument("membership needs a three-qubit state");
                MeasurementScenario sc(3);
                if (!mem_angles.empty()) {
                    if (!mem_optimal_for.empty()) throw InvalidArgument("give either --angles or --optimal-for");
                    const auto a = parse_list(mem_angles);
                    if (a.size() != 12) throw InvalidArgument("--angles needs 12 values");
                    sc = MeasurementScenario(3, a);
                } else if (!mem_optimal_for.empty()) {
                    const ViolationReport v = optimize_operator(loaded.rho, bell_operator(operator_arg(mem_optimal_for)), oo);
                    sc = v.scenario;
                    rep.add("scenario_value", v.value);
                } else {
                    throw InvalidArgument("a state input needs --angles or --optimal-for");
                }
                beh = quantum_behavior(loaded.rho, sc);
            }
            if (!mem_write.empty()) {
                std::ofstream out(mem_write);
                if (!out) throw InvalidArgument("cannot write " + mem_write);
                out << write_behavior(beh);
            }
            rep.add("ns99", operator_value(beh, ns99_operator()));
            rep.add("svetlichny", operator_value(beh, svetlichny_operator()));
            std::vector<ModelKind> models;
            if (mem_model.empty()) {
                models = {ModelKind::FULLY_LOCAL, ModelKind::NS2, ModelKind::S2};
            } else {
                const auto m = parse_model(mem_model);
                if (!m) throw InvalidArgument("unknown model: " + mem_model);
                models = {*m};
            }
            bool failed = false;
            for (ModelKind k : models) {
                const Membership m = membership(beh, k);
                rep.add(std::string(model_name(k)), membership_name(m.status));
                if (m.status == MembershipStatus::Inside) rep.add(std::string(model_name(k)) + "_residual", m.residual);
                failed = failed || m.status == MembershipStatus::NumericalFailure;
            }
            rep.print(json);
            return failed ? kExitNumerical : 0;
        }

        if (*chan) {
            std::vector<ChannelClaim> claims;
            if (chan_examples) {
                claims = evaluate_channel_claims(oo);
            } else {
                const auto loaded = chan_state.load();
                if (loaded.rho.dim() != 8) throw InvalidArgument("channels act on three-qubit states");
                const auto s = parse_list(chan_strengths);
                if (s.size() != 3) throw InvalidArgument("--strengths needs three values");
                ChannelSpec spec{chan_kind == "depolarize" ? ChannelKind::DEPOLARIZE : ChannelKind::AMPLITUDE_DAMP,
                                 {s[0], s[1], s[2]}};
                std::optional<double> eta;
                if (loaded.fp && loaded.fp->family == Family::GGHZ) eta = loaded.fp->eta;
                if (!loaded.pure) throw InvalidArgument("channel input must be a pure state");
                claims.push_back(evaluate_channel_example({"input", *loaded.pure, spec, eta}, oo));
            }
            int i = 0;
            for (const auto& c : claims) {
                const std::string pre = claims.size() > 1 ? "example" + std::to_string(++i) + "." : "";
                rep.add(pre + "name", c.name);
                const auto emit = [&](const std::string& model, const ChannelOutcome& o) {
                    rep.add(pre + model + ".ns99", o.ns99);
                    rep.add(pre + model + ".svetlichny", o.svetlichny);
                    rep.add(pre + model + ".ns99_violated", o.ns_violated);
                    rep.add(pre + model + ".svetlichny_violated", o.svet_violated);
                    rep.add(pre + model + ".physical", o.physical);
                    rep.add(pre + model + ".only_ns99_violated", o.claim_holds());
                };
                emit("kraus", c.kraus);
                if (c.closed_form) emit("closed_form", *c.closed_form);
            }
            rep.print(json);
            return 0;
        }
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const NumericalFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
