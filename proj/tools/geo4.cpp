#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "geo4/json_io.hpp"

using namespace geo4;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kUnsupported = 3;

struct Options {
    std::string format = "text";
    bool batch = false;
    long long bound = 50;
    int height = 5;
    std::string moduli;
    int genus = 2;
    int second_genus = 0;
    std::string indices;
};

void setup_logging()
{
    auto logger = spdlog::stderr_logger_st("geo4");
    logger->set_pattern("geo4 [%l] %v");
    const char* env = std::getenv("GEO4_LOG");
    logger->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
    spdlog::set_default_logger(logger);
}

std::string read_all(std::istream& in)
{
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A path, "-" for stdin, or an inline document starting with '{'.
std::string load_text(const std::string& input)
{
    if (!input.empty() && input.front() == '{') return input;
    if (input == "-") return read_all(std::cin);
    std::ifstream f(input);
    if (!f) throw Error(ErrorKind::Parse, "cannot read '" + input + "'");
    spdlog::debug("reading {}", input);
    return read_all(f);
}

Json parse_json(const std::string& text)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::Parse, e.what());
    }
}

// Documents in a stream, separated by whitespace.
std::vector<Json> parse_stream(const std::string& text)
{
    std::vector<Json> docs;
    std::istringstream in(text);
    for (;;) {
        in >> std::ws;
        if (in.peek() == std::char_traits<char>::eof()) break;
        Json j;
        try {
            in >> j;
        } catch (const Json::parse_error& e) {
            throw Error(ErrorKind::Parse, "document " + std::to_string(docs.size() + 1) + ": " + e.what());
        }
        docs.push_back(std::move(j));
    }
    return docs;
}

// "2,3,5" or ranges "2-10".
std::vector<Int> parse_int_list(const std::string& list, const char* what)
{
    std::vector<Int> out;
    std::istringstream in(list);
    for (std::string s; std::getline(in, s, ',');) {
        const auto dash = s.find('-', 1);
        try {
            if (dash == std::string::npos) {
                out.push_back(Int(std::stoll(s)));
            } else {
                const long long lo = std::stoll(s.substr(0, dash)), hi = std::stoll(s.substr(dash + 1));
                if (hi < lo || hi - lo > 100000) throw Error(ErrorKind::InvalidArgument, std::string("bad range in ") + what);
                for (long long v = lo; v <= hi; ++v) out.push_back(Int(v));
            }
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::InvalidArgument, std::string("bad ") + what + " entry '" + s + "'");
        }
    }
    return out;
}

std::vector<Int> moduli_or(const Options& o, std::vector<Int> fallback)
{
    return o.moduli.empty() ? fallback : parse_int_list(o.moduli, "--moduli");
}

std::vector<Int> range(long long lo, long long hi)
{
    std::vector<Int> v;
    for (long long q = lo; q <= hi; ++q) v.push_back(Int(q));
    return v;
}

std::string join(const std::vector<std::string>& v, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
    return out;
}

std::string scalar(const Json& j)
{
    if (j.is_string()) return j.get<std::string>();
    if (j.is_null()) return "-";
    return j.dump();
}

std::string ints_text(const Json& a)
{
    std::vector<std::string> parts;
    for (const auto& x : a) parts.push_back(scalar(x));
    return "[" + join(parts, ", ") + "]";
}

std::string matrix_text(const Json& m)
{
    std::vector<std::string> rows;
    for (const auto& r : m) rows.push_back(ints_text(r));
    return "[" + join(rows, ", ") + "]";
}

// Reports --------------------------------------------------------------------

Json classify_report(const LatticeDescriptor& d)
{
    return Json{{"command", "classify"},
                {"input", descriptor_json(d)},
                {"classification", classification_json(classify(d))},
                {"features", features_json(features(d))}};
}

Json series_report(const LatticeDescriptor& d)
{
    const auto h = hirsch_length(d);
    return Json{{"command", "series"},
                {"input", descriptor_json(d)},
                {"hirschLength", h ? Json(*h) : Json("NotPolycyclic")},
                {"abelianization", abelian_json(abelianization(d))},
                {"lowerCentral", series_json(lower_central_series(d))},
                {"derived", series_json(derived_series(d))},
                {"features", features_json(features(d))}};
}

Json fingerprint_report(const LatticeDescriptor& d, const Options& o)
{
    Json rows = Json::array();
    for (const auto& q : moduli_or(o, range(2, 10))) rows.push_back(fingerprint_json(fingerprint(d, q)));
    return Json{{"command", "fingerprint"}, {"input", descriptor_json(d)}, {"fingerprints", rows}};
}

Json euler_report(const LatticeDescriptor& d)
{
    const auto* s = std::get_if<SeifertInvariants>(&d);
    if (!s) throw Error(ErrorKind::InvalidArgument, "euler needs a seifert descriptor");
    const EulerClass e = euler_number(*s);
    const BaseOrbifold base = base_orbifold_class(*s);
    return Json{{"command", "euler"},
                {"input", descriptor_json(d)},
                {"euler", euler_json(e)},
                {"splitting", splitting_json(splitting_witness(e.value))},
                {"base", {{"class", base_class_name(base.kind)}, {"chi", rational_json(base.chi)}}}};
}

Json nilclass_report(const LatticeDescriptor& d, const Options& o)
{
    return Json{{"command", "nilclass"},
                {"input", descriptor_json(d)},
                {"nilclass", nilclass_json(nilclass_stabilization(d, moduli_or(o, range(2, 12))))}};
}

CompareOptions compare_options(const Options& o)
{
    if (o.bound < 2) throw Error(ErrorKind::InvalidArgument, "--bound must be at least 2");
    if (o.height < 0) throw Error(ErrorKind::InvalidArgument, "--height must be non-negative");
    CompareOptions c;
    c.bound = o.bound;
    c.height = o.height;
    return c;
}

Json compare_report(const LatticeDescriptor& a, const LatticeDescriptor& b, const Options& o)
{
    return Json{{"command", "compare"},
                {"inputs", {descriptor_json(a), descriptor_json(b)}},
                {"comparison", lattice_comparison_json(compare_lattices(a, b, compare_options(o)))}};
}

Json luck_report(const Options& o)
{
    const auto idx = parse_int_list(o.indices, "--indices");
    if (o.second_genus == 0)
        return Json{{"command", "luck"}, {"genus", o.genus}, {"report", luck_json(luck_approximation_surface(o.genus, idx))}};
    std::vector<std::pair<Int, Int>> pairs;
    for (const auto& d : idx) pairs.emplace_back(d, d);
    return Json{{"command", "luck"},
                {"genus", o.genus},
                {"secondGenus", o.second_genus},
                {"report", luck_json(luck_approximation_product(o.genus, o.second_genus, pairs))}};
}

Json replay_report(const Json& record)
{
    if (!record.is_object() || record.value("command", "") != "compare")
        throw Error(ErrorKind::InvalidDescriptor, "expected a compare report", "command");
    const auto& inputs = record.at("inputs");
    const LatticeDescriptor a = descriptor_from_json(inputs.at(0)), b = descriptor_from_json(inputs.at(1));
    const auto* ta = std::get_if<TorusBundle4>(&a);
    const auto* tb = std::get_if<TorusBundle4>(&b);
    const Json& deep = record.at("comparison").at("deep");
    if (!ta || !tb || deep.is_null())
        throw Error(ErrorKind::InvalidDescriptor, "the record carries no torus bundle verdict", "comparison.deep");
    const CompareVerdict v = verdict_from_json(deep);
    return Json{{"command", "replay"}, {"verdict", verdict_json(v)}, {"replayed", replay(ta->a, tb->a, v)}};
}

// Text rendering ---------------------------------------------------------------

void features_text(std::ostream& out, const Json& f)
{
    out << "features:\n";
    for (const char* k : {"hirschLength", "nilpotentClass", "virtualNilpotentClass", "solvableLength", "beta1",
                          "eulerChar", "virtuallyTag", "nilradical", "eulerOrbit"})
        out << "  " << k << ": " << scalar(f.at(k)) << "\n";
    if (!f.at("cubicProfile").is_null()) {
        const auto& c = f.at("cubicProfile");
        out << "  cubicProfile: " << scalar(c.at("kind")) << ", disc " << scalar(c.at("discriminant")) << ", traces ("
            << scalar(c.at("trace")) << ", " << scalar(c.at("traceInverse")) << ")\n";
    }
}

void series_text(std::ostream& out, const char* name, const Json& s)
{
    out << name << ":";
    if (!s.at("length").is_null()) out << " length " << s.at("length").get<int>();
    else out << " length infinite";
    if (s.at("stabilized").get<bool>()) out << " (stabilized)";
    if (s.at("truncated").get<bool>()) out << " (truncated)";
    out << "\n";
    int i = 1;
    for (const auto& l : s.at("layers")) out << "  layer " << i++ << ": " << scalar(l.at("text")) << "\n";
}

std::string verdict_text(const Json& v)
{
    const std::string kind = v.at("kind");
    if (kind == "Distinguished")
        return kind + " at q = " + scalar(v.at("witnessModulus")) + " by " + scalar(v.at("invariant"));
    if (kind == "ConsistentUpTo") return kind + " " + scalar(v.at("bound"));
    std::string s = kind + ", conjugator " + matrix_text(v.at("conjugator"));
    if (v.at("inverted").get<bool>()) s += " (onto the inverse)";
    return s;
}

void render_text(std::ostream& out, const Json& r)
{
    const std::string cmd = r.at("command");
    if (cmd == "classify") {
        const auto& c = r.at("classification");
        const auto& cert = c.at("certificate");
        out << "label: " << scalar(c.at("label").at("name")) << "\n";
        if (c.at("label").contains("asserted")) out << "asserted geometry: " << scalar(c.at("label").at("asserted")) << "\n";
        if (!cert.at("parameters").empty()) {
            std::vector<std::string> ps;
            for (const auto& [k, v] : cert.at("parameters").items()) ps.push_back(k + " = " + scalar(v));
            out << "parameters: " << join(ps, ", ") << "\n";
        }
        out << "certificate:\n";
        for (const auto& e : cert.at("invariants")) out << "  " << scalar(e.at("name")) << ": " << scalar(e.at("value")) << "\n";
        for (const auto& a : cert.at("anchors")) out << "  anchor: " << scalar(a) << "\n";
        for (const auto& n : cert.at("notes")) out << "  note: " << scalar(n) << "\n";
        features_text(out, r.at("features"));
    } else if (cmd == "series") {
        out << "hirsch length: " << scalar(r.at("hirschLength")) << "\n";
        out << "abelianization: " << scalar(r.at("abelianization").at("text")) << "\n";
        series_text(out, "lower central series", r.at("lowerCentral"));
        series_text(out, "derived series", r.at("derived"));
        features_text(out, r.at("features"));
    } else if (cmd == "fingerprint") {
        for (const auto& f : r.at("fingerprints")) {
            out << "q = " << scalar(f.at("modulus")) << ": charpoly " << ints_text(f.at("charpolyModQ")) << ", traces "
                << ints_text(f.at("tracesModQ")) << ", H1 " << scalar(f.at("quotientAbelianization").at("text"));
            if (!f.at("quotientNilpotentClass").is_null()) out << ", class " << scalar(f.at("quotientNilpotentClass"));
            out << "\n";
        }
    } else if (cmd == "euler") {
        const auto& e = r.at("euler");
        out << "(" << scalar(e.at("value")[0]) << ", " << scalar(e.at("value")[1]) << "), orbit invariant "
            << scalar(e.at("orbitInvariant")) << "\n";
        const auto& s = r.at("splitting");
        if (s.at("split").get<bool>()) out << "splitting: split\n";
        else out << "splitting: non-split, witness q = " << scalar(s.at("witness")) << "\n";
        out << "base: " << scalar(r.at("base").at("class")) << ", chi = " << scalar(r.at("base").at("chi")) << "\n";
    } else if (cmd == "nilclass") {
        const auto& n = r.at("nilclass");
        out << "group class: " << scalar(n.at("groupClass")) << "\n";
        for (const auto& c : n.at("classes"))
            out << "  q = " << scalar(c.at("modulus")) << ": class " << scalar(c.at("class")) << "\n";
        out << "predicted stable: " << ints_text(n.at("predictedStable")) << "\n";
        out << scalar(n.at("description")) << "\n";
    } else if (cmd == "compare") {
        const auto& c = r.at("comparison");
        out << "verdict: " << scalar(c.at("verdict")) << "\n";
        out << "labels: " << scalar(c.at("first").at("name")) << " vs " << scalar(c.at("second").at("name")) << "\n";
        if (!scalar(c.at("reason")).empty()) out << "reason: " << scalar(c.at("reason")) << "\n";
        if (!c.at("deep").is_null()) out << "deep: " << verdict_text(c.at("deep")) << "\n";
    } else if (cmd == "luck") {
        for (const auto& row : r.at("report").at("rows"))
            out << "d = " << scalar(row.at("index")) << ": beta1 " << scalar(row.at("beta1")) << ", ratio "
                << scalar(row.at("ratio")) << "\n";
        out << "limit: " << scalar(r.at("report").at("limit")) << "\n";
    } else if (cmd == "replay") {
        out << verdict_text(r.at("verdict")) << ": " << (r.at("replayed").get<bool>() ? "replayed" : "does not replay") << "\n";
    }
}

void emit(const Json& report, const Options& o)
{
    if (o.format == "json") std::cout << report.dump(o.batch ? -1 : 2) << "\n";
    else render_text(std::cout, report);
}

int exit_code(const Error& e)
{
    return is_input_error(e.kind()) ? kInputError : kUnsupported;
}

Json error_json(const Error& e)
{
    Json j{{"kind", error_kind_name(e.kind())}, {"message", e.what()}};
    if (!e.path().empty()) j["path"] = e.path();
    return Json{{"error", j}};
}

using SingleCommand = std::function<Json(const LatticeDescriptor&)>;

// One report per document; in batch mode one JSON line per document and the
// exit code of the first failure.
int run_single(const std::string& input, const Options& o, const SingleCommand& cmd)
{
    if (!o.batch) {
        emit(cmd(descriptor_from_json(parse_json(load_text(input)))), o);
        return kOk;
    }
    int code = kOk;
    const auto docs = parse_stream(load_text(input));
    spdlog::info("batch of {} documents", docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        try {
            std::cout << cmd(descriptor_from_json(docs[i])).dump() << "\n";
        } catch (const Error& e) {
            spdlog::warn("document {}: {}", i + 1, e.what());
            std::cout << error_json(e).dump() << "\n";
            if (code == kOk) code = exit_code(e);
        }
    }
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    setup_logging();
    CLI::App app{"Thurston geometry classification and profinite fingerprints for 4-manifold lattices"};
    app.require_subcommand(1);
    Options o;
    std::string input, second;

    auto add_format = [&](CLI::App* c) {
        c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    };
    auto add_single = [&](const char* name, const char* help) {
        CLI::App* c = app.add_subcommand(name, help);
        c->add_option("input", input, "Descriptor file, '-' for stdin, or an inline JSON document")->required();
        c->add_flag("--batch", o.batch, "Input is a stream of documents; print one JSON report per line");
        add_format(c);
        return c;
    };

    CLI::App* classify_cmd = add_single("classify", "Geometry label with certificate and features");
    CLI::App* series_cmd = add_single("series", "Lower central and derived series, Hirsch length");
    CLI::App* fingerprint_cmd = add_single("fingerprint", "Congruence fingerprints at the given moduli");
    fingerprint_cmd->add_option("--moduli", o.moduli, "Moduli, e.g. 2,3,5 or 2-10 (default 2-10)");
    CLI::App* euler_cmd = add_single("euler", "Euler number, orbit invariant and splitting witness");
    CLI::App* nilclass_cmd = add_single("nilclass", "Nilpotent class of level quotients and stable moduli");
    nilclass_cmd->add_option("--moduli", o.moduli, "Moduli (default 2-12)");

    CLI::App* compare_cmd = app.add_subcommand("compare", "Compare two lattices");
    compare_cmd->add_option("first", input, "First descriptor")->required();
    compare_cmd->add_option("second", second, "Second descriptor")->required();
    compare_cmd->add_option("--bound", o.bound, "Largest fingerprint modulus");
    compare_cmd->add_option("--height", o.height, "Entry bound for the integral conjugator search");
    add_format(compare_cmd);

    CLI::App* luck_cmd = app.add_subcommand("luck", "beta1 growth along finite covers of surface groups");
    luck_cmd->add_option("--genus", o.genus, "Surface genus");
    luck_cmd->add_option("--second-genus", o.second_genus, "Second factor genus for a product of surfaces");
    luck_cmd->add_option("--indices", o.indices, "Cover indices, e.g. 1,2,3")->required();
    add_format(luck_cmd);

    CLI::App* replay_cmd = app.add_subcommand("replay", "Re-check the verdict recorded in a JSON compare report");
    replay_cmd->add_option("record", input, "Compare report file or '-'")->required();
    add_format(replay_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (classify_cmd->parsed()) return run_single(input, o, classify_report);
        if (series_cmd->parsed()) return run_single(input, o, series_report);
        if (euler_cmd->parsed()) return run_single(input, o, euler_report);
        if (fingerprint_cmd->parsed())
            return run_single(input, o, [&](const LatticeDescriptor& d) { return fingerprint_report(d, o); });
        if (nilclass_cmd->parsed())
            return run_single(input, o, [&](const LatticeDescriptor& d) { return nilclass_report(d, o); });
        if (compare_cmd->parsed()) {
            const auto a = descriptor_from_json(parse_json(load_text(input)));
            const auto b = descriptor_from_json(parse_json(load_text(second)));
            emit(compare_report(a, b, o), o);
            return kOk;
        }
        if (luck_cmd->parsed()) {
            emit(luck_report(o), o);
            return kOk;
        }
        if (replay_cmd->parsed()) {
            const Json r = replay_report(parse_json(load_text(input)));
            emit(r, o);
            return r.at("replayed").get<bool>() ? kOk : kInputError;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << error_kind_name(e.kind()) << ": " << e.what() << "\n";
        if (o.format == "json") std::cout << error_json(e).dump(2) << "\n";
        return exit_code(e);
    } catch (const Json::exception& e) {
        std::cerr << "error: malformed record: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUnsupported;
    }
    return kOk;
}
