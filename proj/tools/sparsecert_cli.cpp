// sparsecert command-line tool: certify vote files, sweep radius frontiers
// and grids, and collect Monte-Carlo votes from built-in or external base
// classifiers. See README.md for the file formats.

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sparsecert/sparsecert.hpp"

namespace {

using namespace sparsecert;

struct ExitCode {
    static constexpr int ok = 0;
    static constexpr int internal = 1;
    static constexpr int usage = 2;
};

std::pair<long, long> parse_range(const std::string& text) {
    auto sep = text.find("..");
    if (sep == std::string::npos) throw ParseError("expected range LO..HI, got '" + text + "'");
    try {
        long lo = std::stol(text.substr(0, sep));
        long hi = std::stol(text.substr(sep + 2));
        if (lo < 0 || hi < lo) throw std::invalid_argument("bad range");
        return {lo, hi};
    } catch (const std::exception&) {
        throw ParseError("expected range LO..HI, got '" + text + "'");
    }
}

std::unique_ptr<smoothing::BaseClassifier> make_classifier(const std::string& spec) {
    auto colon = spec.find(':');
    const std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "constant") return std::make_unique<smoothing::ConstantClassifier>(std::stoi(arg));
    if (kind == "threshold") {
        auto comma = arg.find(',');
        std::size_t feature = std::stoul(comma == std::string::npos ? arg : arg.substr(0, comma));
        std::int32_t t = comma == std::string::npos ? 1 : std::stoi(arg.substr(comma + 1));
        return std::make_unique<smoothing::ThresholdClassifier>(feature, t);
    }
    if (kind == "majority") return std::make_unique<smoothing::MajorityClassifier>(std::stoul(arg));
    if (kind == "linear") {
        auto semi = arg.find(';');
        if (semi == std::string::npos) throw ParseError("linear classifier spec needs 'linear:w1,w2,...;bias'");
        std::vector<double> weights;
        std::stringstream ws(arg.substr(0, semi));
        std::string tok;
        while (std::getline(ws, tok, ',')) weights.push_back(std::stod(tok));
        return std::make_unique<smoothing::LinearClassifier>(std::move(weights), std::stod(arg.substr(semi + 1)));
    }
    if (kind == "cmd") {
        if (arg.empty()) throw ParseError("cmd classifier spec needs 'cmd:<shell command>'");
        return std::make_unique<smoothing::ProcessClassifier>(arg);
    }
    throw ParseError("unknown classifier spec '" + spec + "'");
}

// ---------------------------------------------------------------- certify

struct CertifyOptions {
    std::string votes_path;
    std::string out_path;
    std::string p_plus, p_minus;
    int num_categories = 2;
    std::string alpha = "0.01";
    std::string mode = "multi";
    long ra = 0, rd = 0, rc = 0;
    std::optional<long> l0;
    bool frontier = false;
    long cap = 200;
    std::optional<std::string> grid_ra, grid_rd;
    int jobs = 0;
    bool joint = false;
    std::string p_plus_b, p_minus_b;
    long ra_b = 0, rd_b = 0;
};

// Two-stage decisions depend on the estimation record only through the
// selected class's count and the largest other count, so profiles sharing
// that pair are certified once.
struct ProfileKey {
    std::uint64_t top_count = 0;
    std::uint64_t runner_count = 0;
    bool operator<(const ProfileKey& o) const {
        return std::tie(top_count, runner_count) < std::tie(o.top_count, o.runner_count);
    }
};

ProfileKey profile_key(const VoteRecord& selection, const VoteRecord& estimation) {
    int y_star = 0;
    for (int y = 1; y < static_cast<int>(selection.counts.size()); ++y)
        if (selection.counts[static_cast<std::size_t>(y)] > selection.counts[static_cast<std::size_t>(y_star)])
            y_star = y;
    std::uint64_t runner = 0;
    for (int y = 0; y < static_cast<int>(estimation.counts.size()); ++y)
        if (y != y_star) runner = std::max(runner, estimation.counts[static_cast<std::size_t>(y)]);
    return {estimation.counts[static_cast<std::size_t>(y_star)], runner};
}

int run_certify(const CertifyOptions& opt) {
    const Mode mode = opt.mode == "binary" ? Mode::binary_class : Mode::multi_class;
    const Rational alpha = rational_from_decimal(opt.alpha);
    const NoiseSpec noise = validate_noise_spec(opt.p_plus, opt.p_minus, opt.num_categories);
    const int jobs = opt.jobs > 0 ? opt.jobs : default_jobs();

    std::ifstream in(opt.votes_path);
    if (!in) {
        std::cerr << "error: cannot open votes file '" << opt.votes_path << "'\n";
        return ExitCode::usage;
    }
    io::VotesFile votes = io::read_votes(in);

    std::optional<certify::JointSpec> joint;
    if (opt.joint) {
        if (opt.num_categories != 2) throw CategoryError("--joint supports binary groups only (K=2)");
        joint = certify::JointSpec{noise, RadiiSpec(opt.ra, opt.rd, 0),
                                   validate_noise_spec(opt.p_plus_b, opt.p_minus_b, 2),
                                   RadiiSpec(opt.ra_b, opt.rd_b, 0)};
    }

    // unique two-stage profiles, certified once, in deterministic order
    std::vector<ProfileKey> keys;
    std::map<ProfileKey, ClassBounds> bounds_of;
    keys.reserve(votes.records.size());
    for (const auto& [sel, est] : votes.records) {
        ProfileKey key = profile_key(sel, est);
        keys.push_back(key);
        if (!bounds_of.count(key)) bounds_of.emplace(key, confidence::two_stage_estimate(sel, est, alpha, mode));
    }
    std::vector<std::pair<ProfileKey, ClassBounds>> unique_profiles(bounds_of.begin(), bounds_of.end());

    std::ofstream out(opt.out_path);
    if (!out) {
        std::cerr << "error: cannot open output file '" << opt.out_path << "'\n";
        return ExitCode::usage;
    }

    if (opt.grid_ra || opt.grid_rd) {
        if (!opt.grid_ra || !opt.grid_rd) throw ParseError("grid mode needs both --grid-ra and --grid-rd");
        auto [ra_lo, ra_hi] = parse_range(*opt.grid_ra);
        auto [rd_lo, rd_hi] = parse_range(*opt.grid_rd);
        std::vector<std::pair<long, long>> cells;
        for (long ra = ra_lo; ra <= ra_hi; ++ra)
            for (long rd = rd_lo; rd <= rd_hi; ++rd) cells.emplace_back(ra, rd);
        // certified flag per (cell, profile)
        std::vector<std::map<ProfileKey, bool>> cell_results(cells.size());
        parallel_for(cells.size(), jobs, [&](std::size_t c) {
            auto [ra, rd] = cells[c];
            for (const auto& [key, bounds] : unique_profiles)
                cell_results[c][key] = certify::certify_point(noise, RadiiSpec(ra, rd, 0), bounds).certified;
        });
        out << "ra,rd,certified_ratio\n";
        for (std::size_t c = 0; c < cells.size(); ++c) {
            std::size_t certified = 0;
            for (const ProfileKey& key : keys)
                if (cell_results[c].at(key)) ++certified;
            out << cells[c].first << ',' << cells[c].second << ','
                << decimal_string(make_rational(static_cast<long>(certified), static_cast<long>(keys.size()))) << "\n";
        }
        std::cout << "grid " << cells.size() << " cells x " << keys.size() << " inputs written to " << opt.out_path
                  << "\n";
        return ExitCode::ok;
    }

    if (opt.frontier) {
        std::vector<std::vector<certify::FrontierPoint>> frontiers(unique_profiles.size());
        parallel_for(unique_profiles.size(), jobs, [&](std::size_t i) {
            frontiers[i] = certify::max_radius_frontier(noise, unique_profiles[i].second, opt.cap, opt.rc);
        });
        std::map<ProfileKey, std::size_t> index;
        for (std::size_t i = 0; i < unique_profiles.size(); ++i) index[unique_profiles[i].first] = i;
        out << "id,ra,rd\n";
        std::size_t nontrivial = 0;
        for (std::size_t r = 0; r < votes.records.size(); ++r) {
            const auto& points = frontiers[index.at(keys[r])];
            for (const auto& p : points) {
                if (p.r_add + p.r_del > 0) {
                    ++nontrivial;
                    break;
                }
            }
            for (const auto& p : points) out << votes.records[r].first.input_id << ',' << p.r_add << ',' << p.r_del << "\n";
        }
        std::cout << "certified " << nontrivial << "/" << votes.records.size() << " ("
                  << decimal_string(make_rational(static_cast<long>(nontrivial), static_cast<long>(votes.records.size())), 4)
                  << ") at some radius >= 1\n";
        return ExitCode::ok;
    }

    // point / l0 / joint certification
    std::vector<CertResult> per_profile(unique_profiles.size());
    parallel_for(unique_profiles.size(), jobs, [&](std::size_t i) {
        const ClassBounds& bounds = unique_profiles[i].second;
        if (joint)
            per_profile[i] = certify::certify_point_joint(*joint, bounds);
        else if (opt.l0)
            per_profile[i] = certify::certify_l0(noise, bounds, *opt.l0);
        else
            per_profile[i] = certify::certify_point(noise, RadiiSpec(opt.ra, opt.rd, opt.rc), bounds);
    });
    std::map<ProfileKey, std::size_t> index;
    for (std::size_t i = 0; i < unique_profiles.size(); ++i) index[unique_profiles[i].first] = i;

    std::vector<io::ResultRow> rows;
    rows.reserve(votes.records.size());
    std::size_t certified = 0;
    for (std::size_t r = 0; r < votes.records.size(); ++r) {
        std::size_t i = index.at(keys[r]);
        io::ResultRow row{per_profile[i], unique_profiles[i].second};
        row.cert.input_id = votes.records[r].first.input_id;
        if (row.cert.certified) ++certified;
        rows.push_back(std::move(row));
    }
    io::write_results_csv(out, rows, joint ? std::optional<RadiiSpec>(joint->radii_b) : std::nullopt);
    std::cout << "certified " << certified << "/" << rows.size() << " ("
              << decimal_string(make_rational(static_cast<long>(certified), static_cast<long>(rows.size())), 4) << ")\n";
    return ExitCode::ok;
}

// ---------------------------------------------------------------- sample

struct SampleOptions {
    std::string input_path;
    std::string out_path;
    std::string classifier = "majority:5";
    int num_categories = 2;
    int num_classes = 2;
    std::string p_plus = "0.01", p_minus = "0.6";
    std::uint64_t n0 = 1000;
    std::uint64_t n = 1000000;
    std::uint64_t seed = 0;
    int jobs = 0;
    std::vector<std::string> groups;
    std::string p_plus_b, p_minus_b;
};

std::vector<std::pair<std::string, DiscreteVector>> read_inputs(const std::string& path, int k) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open inputs file '" + path + "'");
    std::vector<std::pair<std::string, DiscreteVector>> inputs;
    std::string line;
    std::size_t line_no = 0, dims = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream rec(line);
        std::string id;
        rec >> id;
        std::vector<std::int32_t> values;
        long v;
        while (rec >> v) values.push_back(static_cast<std::int32_t>(v));
        if (values.empty()) throw ParseError("line " + std::to_string(line_no) + ": input vector is empty");
        if (dims == 0) dims = values.size();
        if (values.size() != dims)
            throw ParseError("line " + std::to_string(line_no) + ": inconsistent dimension (" +
                             std::to_string(values.size()) + " vs " + std::to_string(dims) + ")");
        DiscreteVector vec(std::move(values));
        vec.check_for(k);
        inputs.emplace_back(id, std::move(vec));
    }
    if (inputs.empty()) throw ParseError("inputs file '" + path + "' has no vectors");
    return inputs;
}

int run_sample(const SampleOptions& opt) {
    const NoiseSpec noise = validate_noise_spec(opt.p_plus, opt.p_minus, opt.num_categories);
    auto inputs = read_inputs(opt.input_path, opt.num_categories);
    auto classifier = make_classifier(opt.classifier);

    smoothing::SamplerConfig cfg{noise, opt.seed, opt.n0, opt.n, std::nullopt,
                                 opt.jobs > 0 ? opt.jobs : default_jobs()};
    if (!opt.groups.empty()) {
        if (opt.groups.size() != 2) throw ParseError("joint sampling needs exactly two --group flags");
        auto parse_group = [](const std::string& text) {
            auto colon = text.find(':');
            if (colon == std::string::npos) throw ParseError("expected --group NAME:LO..HI, got '" + text + "'");
            auto [lo, hi] = parse_range(text.substr(colon + 1));
            return std::pair<std::size_t, std::size_t>(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi) + 1);
        };
        auto [a_begin, a_end] = parse_group(opt.groups[0]);
        auto [b_begin, b_end] = parse_group(opt.groups[1]);
        if (opt.p_plus_b.empty() || opt.p_minus_b.empty())
            throw ParseError("joint sampling needs --p-plus-b and --p-minus-b for the second group");
        NoiseSpec noise_b = validate_noise_spec(opt.p_plus_b, opt.p_minus_b, opt.num_categories);
        cfg.grouping = {smoothing::SamplerGroup{a_begin, a_end, noise},
                        smoothing::SamplerGroup{b_begin, b_end, noise_b}};
    }

    io::VotesFile votes;
    votes.num_classes = opt.num_classes;
    votes.num_selection = opt.n0;
    votes.num_estimation = opt.n;
    for (const auto& [id, x] : inputs) {
        auto [sel, est] = smoothing::collect_votes(x, *classifier, cfg, opt.num_classes, id);
        votes.records.emplace_back(std::move(sel), std::move(est));
    }

    std::ofstream out(opt.out_path);
    if (!out) {
        std::cerr << "error: cannot open output file '" << opt.out_path << "'\n";
        return ExitCode::usage;
    }
    io::write_votes(out, votes);
    std::cout << "sampled " << votes.records.size() << " inputs (" << opt.n0 << "+" << opt.n << " draws each) to "
              << opt.out_path << "\n";
    return ExitCode::ok;
}

// ---------------------------------------------------------------- selftest

int run_selftest() {
    int failures = 0;
    auto check = [&](bool ok, const std::string& name) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    auto tables_equal = [](const RegionTable& a, const RegionTable& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!(a.entries[i].ratio == b.entries[i].ratio) || a.entries[i].prob_x != b.entries[i].prob_x ||
                a.entries[i].prob_xt != b.entries[i].prob_xt)
                return false;
        return true;
    };

    // worked golden example
    {
        NoiseSpec noise = validate_noise_spec("0.2", "0.4", 2);
        RegionTable table = regions::binary_regions(noise, RadiiSpec(1, 1));
        Rational r = certify::rho(table, rational_from_decimal("0.9"));
        check(r == Rational(1, 2), "worked example: rho(0.9) = 1/2 for (0.2, 0.4, ra=1, rd=1)");
    }

    // oracle equivalence sweep (compact)
    {
        bool ok = true;
        for (int pp = 1; pp <= 9 && ok; pp += 4)
            for (int pm = 1; pm <= 9 && ok; pm += 4)
                for (long ra = 0; ra <= 2 && ok; ++ra)
                    for (long rd = 0; rd + ra <= 4 && ok; ++rd) {
                        NoiseSpec noise(make_rational(pp, 10), make_rational(pm, 10), 2);
                        auto [x, xt] = sphere_representatives(RadiiSpec(ra, rd), 2);
                        ok = tables_equal(certify::build_table(noise, RadiiSpec(ra, rd)),
                                          oracle::enumerate_regions(x, xt, noise));
                    }
        check(ok, "binary region tables match the enumeration oracle");
    }

    // LP equivalence (compact)
    {
        bool ok = true;
        NoiseSpec noise = validate_noise_spec("0.3", "0.6", 2);
        auto [x, xt] = sphere_representatives(RadiiSpec(2, 1), 2);
        RegionTable table = certify::build_table(noise, RadiiSpec(2, 1));
        for (int p = 1; p <= 9 && ok; ++p) {
            Rational budget = make_rational(p, 10);
            ok = certify::rho(table, budget) == oracle::lp_exact(x, xt, noise, budget);
        }
        check(ok, "greedy rho matches the exact finest-partition LP");
    }

    // Clopper-Pearson closed form
    {
        Rational lower = exactmath::clopper_pearson_lower(1000, 1000, rational_from_decimal("0.01"));
        double expect = std::pow(0.01, 0.001);
        check(std::abs(to_double(lower) - expect) < 1e-10, "clopper_pearson_lower(n,n,alpha) = alpha^(1/n)");
    }

    if (failures == 0) std::cout << "selftest: all checks passed\n";
    return failures == 0 ? ExitCode::ok : ExitCode::internal;
}

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGPIPE, SIG_IGN);  // external classifiers may exit first

    CLI::App app{"sparsity-aware randomized smoothing certification"};
    app.require_subcommand(1);

    CertifyOptions copt;
    CLI::App* certify_cmd = app.add_subcommand("certify", "certify a votes file");
    certify_cmd->add_option("--votes", copt.votes_path, "votes file")->required();
    certify_cmd->add_option("--out", copt.out_path, "output CSV")->required();
    certify_cmd->add_option("--p-plus", copt.p_plus, "flip probability for zeros")->required();
    certify_cmd->add_option("--p-minus", copt.p_minus, "flip probability for non-zeros")->required();
    certify_cmd->add_option("-K,--categories", copt.num_categories, "number of discrete categories");
    certify_cmd->add_option("--alpha", copt.alpha, "confidence level");
    certify_cmd->add_option("--mode", copt.mode, "binary|multi")->check(CLI::IsMember({"binary", "multi"}));
    certify_cmd->add_option("--ra", copt.ra, "addition radius");
    certify_cmd->add_option("--rd", copt.rd, "deletion radius");
    certify_cmd->add_option("--rc", copt.rc, "change radius (K>2)");
    auto* l0_opt = certify_cmd->add_option("--l0", copt.l0, "certify the whole l0 ball of this radius");
    auto* frontier_flag = certify_cmd->add_flag("--frontier", copt.frontier, "emit the maximal certifiable radii");
    certify_cmd->add_option("--cap", copt.cap, "frontier search cap per axis");
    auto* grid_ra = certify_cmd->add_option("--grid-ra", copt.grid_ra, "grid LO..HI for ra");
    certify_cmd->add_option("--grid-rd", copt.grid_rd, "grid LO..HI for rd");
    certify_cmd->add_option("--jobs", copt.jobs, "worker threads (default: SPARSECERT_JOBS or hardware)");
    auto* joint_flag = certify_cmd->add_flag("--joint", copt.joint, "two-group product certificate");
    certify_cmd->add_option("--p-plus-b", copt.p_plus_b, "group B flip probability for zeros");
    certify_cmd->add_option("--p-minus-b", copt.p_minus_b, "group B flip probability for non-zeros");
    certify_cmd->add_option("--ra-b", copt.ra_b, "group B addition radius");
    certify_cmd->add_option("--rd-b", copt.rd_b, "group B deletion radius");
    l0_opt->excludes(frontier_flag)->excludes(grid_ra)->excludes(joint_flag);
    frontier_flag->excludes(grid_ra)->excludes(joint_flag);

    SampleOptions sopt;
    CLI::App* sample_cmd = app.add_subcommand("sample", "collect Monte-Carlo votes");
    sample_cmd->add_option("--input", sopt.input_path, "input vectors file")->required();
    sample_cmd->add_option("--out", sopt.out_path, "output votes file")->required();
    sample_cmd->add_option("--classifier", sopt.classifier,
                           "constant:c | threshold:i[,t] | majority:k | linear:w,..;b | cmd:<shell>");
    sample_cmd->add_option("-K,--categories", sopt.num_categories, "number of discrete categories");
    sample_cmd->add_option("--classes", sopt.num_classes, "number of output classes");
    sample_cmd->add_option("--p-plus", sopt.p_plus, "flip probability for zeros");
    sample_cmd->add_option("--p-minus", sopt.p_minus, "flip probability for non-zeros");
    sample_cmd->add_option("--n0", sopt.n0, "selection samples");
    sample_cmd->add_option("--n", sopt.n, "estimation samples");
    sample_cmd->add_option("--seed", sopt.seed, "rng seed");
    sample_cmd->add_option("--jobs", sopt.jobs, "worker threads");
    sample_cmd->add_option("--group", sopt.groups, "joint grouping NAME:LO..HI (give twice)");
    sample_cmd->add_option("--p-plus-b", sopt.p_plus_b, "second group flip probability for zeros");
    sample_cmd->add_option("--p-minus-b", sopt.p_minus_b, "second group flip probability for non-zeros");

    CLI::App* selftest_cmd = app.add_subcommand("selftest", "run built-in oracle sweeps");

    CLI11_PARSE(app, argc, argv);

    try {
        if (certify_cmd->parsed()) return run_certify(copt);
        if (sample_cmd->parsed()) return run_sample(sopt);
        if (selftest_cmd->parsed()) return run_selftest();
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitCode::usage;
    } catch (const RangeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitCode::usage;
    } catch (const CategoryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitCode::usage;
    } catch (const BoundaryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitCode::usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitCode::internal;
    }
    return ExitCode::usage;
}
