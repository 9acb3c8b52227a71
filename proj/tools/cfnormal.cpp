// Command-line front end: digit streams, normality statistics, censuses and
// the arithmetic counters.
//
// Exit status: 0 ok, 2 usage or invalid input, 3 I/O failure, 4 resource
// limit exceeded.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfnormal/arith.hpp"
#include "cfnormal/census.hpp"
#include "cfnormal/cf_core.hpp"
#include "cfnormal/enumeration.hpp"
#include "cfnormal/integer.hpp"
#include "cfnormal/measures.hpp"
#include "cfnormal/report_io.hpp"
#include "cfnormal/stream_stats.hpp"

namespace {

using namespace cfn;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitResource = 4;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Destination chosen by --out: a file when given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw IoError("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    void finish() {
        stream().flush();
        if (!stream()) throw IoError("write failed");
    }

private:
    std::ofstream file_;
};

void write_json(const std::string& out_path, const Json& j) {
    Output out(out_path);
    out.stream() << j.dump(2) << '\n';
    out.finish();
}

struct Common {
    std::string kind = "all";
    std::string conv = "long";
    std::string out;
    std::string format = "json";
    unsigned threads = 0;
};

unsigned resolve_threads(unsigned requested) { return requested ? requested : default_threads(); }

// ---------------------------------------------------------------------------

struct ExpandArgs {
    std::string rational;
    std::string conv = "long";
    std::string format = "text";
    std::string out;
};

int cmd_expand(const ExpandArgs& a) {
    const Rational r = Rational::parse(a.rational);
    const Convention conv = parse_convention(a.conv);
    const auto e = expand(r, conv);
    const auto conv_list = convergents(e);
    if (a.format == "json") {
        Json rows = Json::array();
        for (const auto& c : conv_list) rows.push_back({{"k", c.index}, {"p", to_string(c.p)}, {"q", to_string(c.q)}});
        Json digits = Json::array();
        for (Digit d : e.digits()) digits.push_back(d);
        write_json(a.out, {{"config", {{"command", "expand"}, {"rational", r.to_string()}, {"conv", a.conv}}},
                           {"digits", digits},
                           {"convergents", rows}});
        return kExitOk;
    }
    Output out(a.out);
    out.stream() << digits_to_string(e.digits()) << '\n';
    out.stream() << "k\tp_k\tq_k\n";
    for (const auto& c : conv_list) out.stream() << c.index << '\t' << to_string(c.p) << '\t' << to_string(c.q) << '\n';
    out.finish();
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct StreamArgs {
    Common c;
    std::uint64_t n = 0;
    bool header = false;
    bool binary = false;
};

int cmd_stream(const StreamArgs& a) {
    DigitStream s(parse_kind(a.c.kind), parse_convention(a.c.conv));
    Output out(a.c.out);
    dump_stream(s, a.n, out.stream(), a.binary ? DumpFormat::Varint : DumpFormat::Text, a.header);
    out.finish();
    return kExitOk;
}

struct StreamFileArgs {
    std::string path;
    std::string conv = "long";
    std::string out;
    std::string report;
    bool header = false;
    bool binary = false;
};

std::vector<std::uint64_t> read_indices(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open index file: " + path);
    std::vector<std::uint64_t> out;
    std::string tok;
    while (in >> tok) {
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("malformed index: " + tok);
        }
        std::size_t used = 0;
        std::uint64_t v = 0;
        try {
            v = std::stoull(tok, &used);
        } catch (const std::out_of_range&) {
            throw std::invalid_argument("index out of range: " + tok);
        }
        if (v == 0) throw std::invalid_argument("indices start at 1");
        out.push_back(v);
    }
    if (in.bad()) throw IoError("read failed: " + path);
    return out;
}

int cmd_stream_file(const StreamFileArgs& a) {
    const Convention conv = parse_convention(a.conv);
    auto indices = read_indices(a.path);
    const auto hyp = hypothesis_ratios(std::span<const std::uint64_t>(indices), conv);
    auto s = DigitStream::from_indices(indices, conv);
    Output out(a.out);
    dump_stream(s, ~std::uint64_t{0}, out.stream(), a.binary ? DumpFormat::Varint : DumpFormat::Text, a.header);
    out.finish();
    Json j = {{"config", {{"command", "stream-file"}, {"file", a.path}, {"conv", a.conv}, {"rationals", indices.size()}}},
              {"hypothesis", to_json(hyp)}};
    if (!a.report.empty()) {
        write_json(a.report, j);
    } else {
        std::cerr << j.dump() << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
    Common c;
    std::uint64_t N = 1'000'000;
    std::uint64_t max_digit = 5;
    std::uint64_t max_len = 2;
    std::vector<std::string> patterns;
    std::uint64_t hypothesis = 0;
};

int cmd_stats(const StatsArgs& a) {
    const auto kind = parse_kind(a.c.kind);
    const auto conv = parse_convention(a.c.conv);
    NormalityReport rep;
    if (!a.patterns.empty()) {
        std::vector<Pattern> pats;
        for (const auto& p : a.patterns) pats.push_back(Pattern::parse(p));
        if (a.N < 1000) throw std::invalid_argument("stats requires N >= 1000");
        DigitStream s(kind, conv);
        rep = pattern_report(s, std::move(pats), a.N);
    } else {
        rep = normality_report(kind, conv, a.N, a.max_digit, a.max_len);
    }
    Json j = to_json(rep);
    Json config = {{"command", "stats"}, {"kind", a.c.kind}, {"conv", a.c.conv}, {"N", a.N}};
    if (a.patterns.empty()) {
        config["max_digit"] = a.max_digit;
        config["max_len"] = a.max_len;
    } else {
        config["patterns"] = a.patterns;
    }
    Json ordered = {{"config", config}};
    for (auto& [k, v] : j.items()) ordered[k] = v;
    if (a.hypothesis) {
        Json rows = Json::array();
        for (const auto& r : hypothesis_ratios(kind, conv, a.hypothesis)) rows.push_back(to_json(r));
        ordered["hypothesis"] = rows;
    }
    write_json(a.c.out, ordered);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct CensusArgs {
    Common c;
    std::vector<std::uint64_t> m{256};
    double eps = 0.25;
    std::string pattern = "1";
    bool timing = false;
};

int cmd_census(const CensusArgs& a) {
    const auto kind = parse_kind(a.c.kind);
    const auto p = NormalityParams::make(a.eps, Pattern::parse(a.pattern), parse_convention(a.c.conv));
    const unsigned threads = resolve_threads(a.c.threads);
    std::vector<CensusReport> reps;
    for (std::uint64_t m : a.m) reps.push_back(run_census(kind, m, p, threads));
    if (a.c.format == "csv") {
        Output out(a.c.out);
        out.stream() << census_csv(reps);
        out.finish();
        return kExitOk;
    }
    Json j = census_json(reps, a.timing);
    Json config = {{"command", "census"}, {"kind", a.c.kind}, {"conv", a.c.conv}, {"eps", a.eps},
                   {"s", a.pattern}, {"m", a.m}};
    Json ordered = {{"config", config}};
    for (auto& [k, v] : j.items()) ordered[k] = v;
    write_json(a.c.out, ordered);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct CountArgs {
    Common c;
    std::uint64_t m = 2;
};

int cmd_count(const CountArgs& a) {
    if (a.m < 2) throw std::invalid_argument("count requires m >= 2");
    const std::uint64_t n = count_R(parse_kind(a.c.kind), a.m);
    if (a.c.format == "json") {
        write_json(a.c.out, {{"config", {{"command", "count"}, {"kind", a.c.kind}, {"m", a.m}}}, {"count", n}});
        return kExitOk;
    }
    Output out(a.c.out);
    out.stream() << n << '\n';
    out.finish();
    return kExitOk;
}

struct PiPrimeArgs {
    std::uint64_t x = 1, q = 1, a = 1;
    std::uint64_t qp = 0, ap = 0;
    std::string format = "text";
    std::string out;
};

int cmd_piprime(const PiPrimeArgs& a) {
    if (a.x < 1) throw std::invalid_argument("piprime requires x >= 1");
    const bool joint = a.qp != 0;
    const std::uint64_t n = joint ? pi_prime_joint(a.x, a.q, a.a, a.qp, a.ap) : pi_prime_linear(a.x, a.q, a.a);
    if (a.format == "json") {
        Json config = {{"command", "piprime"}, {"x", a.x}, {"q", a.q}, {"a", a.a}};
        if (joint) {
            config["qp"] = a.qp;
            config["ap"] = a.ap;
        }
        write_json(a.out, {{"config", config}, {"count", n}});
        return kExitOk;
    }
    Output out(a.out);
    out.stream() << n << '\n';
    out.finish();
    return kExitOk;
}

int cmd_constants(const std::string& out) {
    write_json(out, {{"config", {{"command", "constants"}}}, {"constants", to_json(constants())}});
    return kExitOk;
}

struct MeasureArgs {
    std::string pattern;
    std::string out;
};

int cmd_measure(const MeasureArgs& a) {
    const Pattern s = Pattern::parse(a.pattern);
    const auto geo = cylinder_geometry(s);
    write_json(a.out, {{"config", {{"command", "measure"}, {"s", a.pattern}}},
                       {"pattern", pattern_json(s)},
                       {"lower", geo.lower.to_string()},
                       {"upper", geo.upper.to_string()},
                       {"lebesgue", lebesgue_measure(s).to_string()},
                       {"mu", gauss_measure(s)}});
    return kExitOk;
}

struct MonteCarloArgs {
    std::string set = "E";
    double eps = 0.5;
    std::string pattern = "1";
    std::vector<std::uint64_t> N{100, 1000, 10000};
    std::uint64_t samples = 100'000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string out;
};

int cmd_montecarlo(const MonteCarloArgs& a) {
    if (a.set != "E" && a.set != "F") throw std::invalid_argument("--set must be E or F");
    if (a.N.empty()) throw std::invalid_argument("at least one N is required");
    const Pattern s = Pattern::parse(a.pattern);
    std::uint64_t depth = 0;
    for (auto n : a.N) {
        if (n < 1) throw std::invalid_argument("N must be >= 1");
        depth = std::max<std::uint64_t>(depth, n + s.size() - 1);
    }
    if (depth > 10'000'000) throw ResourceError("prefix depth exceeds 10^7 digits");
    const bool is_e = a.set == "E";
    const auto est = sample_statistics(
        [&](std::span<const Digit> d, std::span<double> out) {
            for (std::size_t i = 0; i < a.N.size(); ++i) {
                out[i] = (is_e ? in_E_set(d, a.eps, s, a.N[i]) : in_F_set(d, a.eps, a.N[i])) ? 1.0 : 0.0;
            }
        },
        a.N.size(), depth, a.samples, a.seed, resolve_threads(a.threads));
    Json rows = Json::array();
    for (std::size_t i = 0; i < a.N.size(); ++i) {
        Json row = to_json(est[i]);
        row["N"] = a.N[i];
        rows.push_back(row);
    }
    Json config = {{"command", "montecarlo"}, {"set", a.set}, {"eps", a.eps}, {"N", a.N},
                   {"samples", a.samples}, {"seed", a.seed}};
    if (is_e) config["s"] = a.pattern;
    write_json(a.out, {{"config", config}, {"rows", rows}});
    return kExitOk;
}

// ---------------------------------------------------------------------------

void add_kind_conv(CLI::App* cmd, Common& c) {
    cmd->add_option("--kind", c.kind, "Sequence: aks-dup, all, squarefree, type1, type2, type3")->capture_default_str();
    cmd->add_option("--conv", c.conv, "Expansion convention: short or long")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continued-fraction normal numbers: streams, statistics and censuses"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "cfnormal 1.0");

    ExpandArgs expand_args;
    auto* expand_cmd = app.add_subcommand("expand", "Expand p/q and print its convergents");
    expand_cmd->add_option("rational", expand_args.rational, "p/q in lowest terms, 0 < p < q")->required();
    expand_cmd->add_option("--conv", expand_args.conv)->capture_default_str();
    expand_cmd->add_option("--format", expand_args.format)->check(CLI::IsMember({"text", "json"}));
    expand_cmd->add_option("--out", expand_args.out);

    StreamArgs stream_args;
    auto* stream_cmd = app.add_subcommand("stream", "Write the first n digits of a concatenated stream");
    add_kind_conv(stream_cmd, stream_args.c);
    stream_cmd->add_option("-n", stream_args.n, "Number of digits")->required();
    stream_cmd->add_flag("--header", stream_args.header, "Prefix a cfdigits v1 header line");
    stream_cmd->add_flag("--binary", stream_args.binary, "LEB128 varint output");
    stream_cmd->add_option("--out", stream_args.c.out);

    StreamFileArgs file_args;
    auto* file_cmd = app.add_subcommand("stream-file", "Stream rationals picked by an index file");
    file_cmd->add_option("file", file_args.path, "Whitespace-separated indices into the lowest-terms sequence")
        ->required();
    file_cmd->add_option("--conv", file_args.conv)->capture_default_str();
    file_cmd->add_flag("--header", file_args.header);
    file_cmd->add_flag("--binary", file_args.binary);
    file_cmd->add_option("--out", file_args.out);
    file_cmd->add_option("--report", file_args.report, "Write the hypothesis diagnostics JSON here");

    StatsArgs stats_args;
    auto* stats_cmd = app.add_subcommand("stats", "Digit-frequency and growth report");
    add_kind_conv(stats_cmd, stats_args.c);
    stats_cmd->add_option("-N", stats_args.N)->capture_default_str();
    stats_cmd->add_option("--max-digit", stats_args.max_digit)->capture_default_str();
    stats_cmd->add_option("--max-len", stats_args.max_len)->capture_default_str();
    stats_cmd->add_option("--pattern", stats_args.patterns, "Explicit pattern such as 1,2 (repeatable)");
    stats_cmd->add_option("--hypothesis", stats_args.hypothesis, "Also report length ratios at n, 2n, 4n");
    stats_cmd->add_option("--out", stats_args.c.out);

    CensusArgs census_args;
    auto* census_cmd = app.add_subcommand("census", "Count (eps, s)-abnormal rationals up to denominator m");
    add_kind_conv(census_cmd, census_args.c);
    census_cmd->add_option("-m", census_args.m, "Denominator bound (repeatable)")->capture_default_str();
    census_cmd->add_option("--eps", census_args.eps)->capture_default_str();
    census_cmd->add_option("-s,--pattern", census_args.pattern)->capture_default_str();
    census_cmd->add_option("--format", census_args.c.format)->check(CLI::IsMember({"json", "csv"}));
    census_cmd->add_option("--threads", census_args.c.threads, "Worker threads (default: CFNORMAL_THREADS or cores)");
    census_cmd->add_flag("--timing", census_args.timing, "Include wall time in JSON rows");
    census_cmd->add_option("--out", census_args.c.out);

    CountArgs count_args;
    count_args.c.format = "text";
    auto* count_cmd = app.add_subcommand("count", "|R(m)| for a sequence kind");
    count_cmd->add_option("--kind", count_args.c.kind)->capture_default_str();
    count_cmd->add_option("-m", count_args.m)->required();
    count_cmd->add_option("--format", count_args.c.format)->check(CLI::IsMember({"text", "json"}));
    count_cmd->add_option("--out", count_args.c.out);

    PiPrimeArgs pi_args;
    auto* pi_cmd = app.add_subcommand("piprime", "Count l <= x with lq + a prime (and l q' + a' prime)");
    pi_cmd->add_option("-x", pi_args.x)->required();
    pi_cmd->add_option("-q", pi_args.q)->required();
    pi_cmd->add_option("-a", pi_args.a)->required();
    pi_cmd->add_option("--qp", pi_args.qp, "Second form's modulus (joint count)");
    pi_cmd->add_option("--ap", pi_args.ap, "Second form's offset (joint count)");
    pi_cmd->add_option("--format", pi_args.format)->check(CLI::IsMember({"text", "json"}));
    pi_cmd->add_option("--out", pi_args.out);

    std::string constants_out;
    auto* const_cmd = app.add_subcommand("constants", "Print g, G and ln 2");
    const_cmd->add_option("--out", constants_out);

    MeasureArgs measure_args;
    auto* measure_cmd = app.add_subcommand("measure", "Cylinder endpoints and measures of a pattern");
    measure_cmd->add_option("pattern", measure_args.pattern, "Digits such as 1,2")->required();
    measure_cmd->add_option("--out", measure_args.out);

    MonteCarloArgs mc_args;
    auto* mc_cmd = app.add_subcommand("montecarlo", "Estimate the Gauss measure of the E or F deviation sets");
    mc_cmd->add_option("--set", mc_args.set)->check(CLI::IsMember({"E", "F"}))->capture_default_str();
    mc_cmd->add_option("--eps", mc_args.eps)->capture_default_str();
    mc_cmd->add_option("-s,--pattern", mc_args.pattern)->capture_default_str();
    mc_cmd->add_option("-N", mc_args.N, "Prefix lengths (repeatable)")->capture_default_str();
    mc_cmd->add_option("--samples", mc_args.samples)->capture_default_str();
    mc_cmd->add_option("--seed", mc_args.seed)->capture_default_str();
    mc_cmd->add_option("--threads", mc_args.threads);
    mc_cmd->add_option("--out", mc_args.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*expand_cmd) return cmd_expand(expand_args);
        if (*stream_cmd) return cmd_stream(stream_args);
        if (*file_cmd) return cmd_stream_file(file_args);
        if (*stats_cmd) return cmd_stats(stats_args);
        if (*census_cmd) return cmd_census(census_args);
        if (*count_cmd) return cmd_count(count_args);
        if (*pi_cmd) return cmd_piprime(pi_args);
        if (*const_cmd) return cmd_constants(constants_out);
        if (*measure_cmd) return cmd_measure(measure_args);
        if (*mc_cmd) return cmd_montecarlo(mc_args);
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitResource;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::logic_error& e) {
        // invalid_argument, domain_error, out_of_range, length_error
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::overflow_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}
