#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

std::string quote(const std::string& s)
{
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

Run run(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + " " + quote(GEO4_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data(const std::string& name)
{
    return quote(std::string(GEO4_DATA) + "/descriptors/" + name);
}

std::string tb(const std::string& rows)
{
    return quote(R"({"schemaVersion":"1","kind":"torus_bundle_4","payload":{"matrix":)" + rows + "}}");
}

fs::path temp_file(const std::string& name, const std::string& content)
{
    const fs::path p = fs::temp_directory_path() / ("geo4_cli_test_" + name);
    std::ofstream(p) << content;
    return p;
}

} // namespace

TEST_CASE("bundled descriptors classify to their geometry")
{
    const std::map<std::string, std::string> expected{
        {"e4_identity", "E4"},
        {"nil3xe_unipotent2", "Nil3_x_E"},
        {"nil4_unipotent3", "Nil4"},
        {"sol4_5_6", "Sol4_{5,6}"},
        {"sol3xe_4_4", "Sol3_x_E"},
        {"sol4_0", "Sol4_0"},
        {"sol4_1_gamma2", "Sol4_1"},
        {"nil4_gamma2", "Nil4"},
        {"nil3xe_t2_bundle", "Nil3_x_E"},
        {"h2xe2_seifert", "H2_x_E2"},
        {"sl2xe_seifert", "SLtilde_x_E"},
        {"nongeometric_seifert", "NonGeometric"},
        {"s3xe_seifert", "S3_x_E"},
        {"s2xe2_seifert", "S2_x_E2"},
        {"h2xh2_product", "H2_x_H2"},
        {"h2xs2_product", "H2_x_S2"},
        {"h2xe2_product", "H2_x_E2"},
        {"h3xe_product", "H3_x_E"},
        {"s2xs2_product", "S2_x_S2"},
        {"h4_opaque", "OutOfScope"},
        {"h2c_opaque", "OutOfScope"},
        {"cp2_opaque", "CP2"},
    };
    std::size_t seen = 0;
    for (const auto& entry : fs::directory_iterator(std::string(GEO4_DATA) + "/descriptors")) {
        const std::string stem = entry.path().stem().string();
        INFO(stem);
        REQUIRE(expected.count(stem));
        const Run r = run("classify --format json " + quote(entry.path().string()));
        CHECK(r.code == 0);
        CHECK(Json::parse(r.out).at("classification").at("label").at("name") == expected.at(stem));
        ++seen;
    }
    CHECK(seen == expected.size());
}

TEST_CASE("classify examples")
{
    const Run sol = run("classify " + tb("[[0,0,1],[1,0,-6],[0,1,5]]"));
    CHECK(sol.code == 0);
    CHECK(sol.out.rfind("label: Sol4_{5,6}\n", 0) == 0);
    CHECK(run("classify " + tb("[[1,0,0],[0,1,0],[0,0,1]]")).out.rfind("label: E4\n", 0) == 0);
    const Run sl = run("classify " + data("sl2xe_seifert.json"));
    CHECK(sl.out.rfind("label: SLtilde_x_E\n", 0) == 0);
    const Run ng = run("classify --format json " + data("nongeometric_seifert.json"));
    CHECK(ng.code == 0);
    CHECK(Json::parse(ng.out).at("classification").at("label").at("name") == "NonGeometric");
}

TEST_CASE("compare examples")
{
    const Run d = run("compare " + data("sol4_5_6.json") + " " + data("sol4_0.json"));
    CHECK(d.code == 0);
    CHECK(d.out.find("verdict: Distinguished") != std::string::npos);

    const Run iso = run("compare --format json " + tb("[[0,0,1],[1,0,-6],[0,1,5]]") + " " +
                        tb("[[-13,26,15],[-13,25,14],[7,-13,-7]]"));
    CHECK(iso.code == 0);
    CHECK(Json::parse(iso.out).at("comparison").at("verdict") == "ProfinitelyIsomorphic");

    const Run inc = run("compare " + data("h2xh2_product.json") + " " +
                        quote(R"({"schemaVersion":"1","kind":"product","payload":{"first":{"kind":"surface","genus":2},"second":{"kind":"surface","genus":2}}})"));
    CHECK(inc.code == 0);
    CHECK(inc.out.find("verdict: Inconclusive") != std::string::npos);

    const Run dist = run("compare --bound 10 " + tb("[[0,0,1],[1,0,0],[0,1,1]]") + " " + tb("[[0,0,1],[1,0,-7],[0,1,5]]"));
    CHECK(dist.out.find("Distinguished at q = 2 by trace of inverse") != std::string::npos);
}

TEST_CASE("euler, series and luck reports")
{
    const Run e = run("euler " + quote(R"({"schemaVersion":"1","kind":"seifert","payload":{"genus":0,"conePoints":[{"m":2,"a":1,"b":0}]}})"));
    CHECK(e.code == 0);
    CHECK(e.out.rfind("(1/2, 0), orbit invariant 1/2\n", 0) == 0);

    const Run s = run("series --format json " + data("sol4_1_gamma2.json"));
    CHECK(s.code == 0);
    const Json sj = Json::parse(s.out);
    CHECK(sj.at("derived").at("length") == 3);
    CHECK(sj.at("features").at("beta1") == 1);

    const Run l = run("luck --genus 2 --indices 1,2,3 --format json");
    CHECK(l.code == 0);
    std::vector<std::string> ratios;
    const Json lj = Json::parse(l.out);
    for (const auto& row : lj.at("report").at("rows")) ratios.push_back(row.at("ratio").get<std::string>());
    CHECK(ratios == std::vector<std::string>{"4", "3", "8/3"});

    const Run f = run("fingerprint --moduli 2,5-6 " + data("e4_identity.json") + " --format json");
    CHECK(f.code == 0);
    CHECK(Json::parse(f.out).at("fingerprints").size() == 3);
    const Run n = run("nilclass --moduli 2-5 --format json " + quote(R"({"schemaVersion":"1","kind":"gamma_q","payload":{"q":2}})"));
    CHECK(n.code == 0);
    CHECK(Json::parse(n.out).at("nilclass").at("groupClass") == 2);
}

TEST_CASE("exit codes")
{
    CHECK(run("--help").code == 0);
    CHECK(run("").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("classify --format xml " + data("e4_identity.json")).code == 2);
    CHECK(run("classify /nonexistent/file.json").code == 2);
    CHECK(run("classify " + quote("{broken")).code == 2);
    CHECK(run("classify " + tb("[[2,0,0],[0,1,0],[0,0,1]]")).code == 2);
    CHECK(run("euler " + data("e4_identity.json")).code == 2);
    CHECK(run("luck --genus 1 --indices 1").code == 2);
    // a spherical base with nontrivial monodromy, and an unsupported fingerprint family
    CHECK(run("classify " + quote(R"({"schemaVersion":"1","kind":"seifert","payload":{"baseOrientable":false,"genus":1,"monodromies":[[[-1,0],[0,1]]]}})")).code == 3);
    CHECK(run("fingerprint " + quote(R"({"schemaVersion":"1","kind":"gamma_q","payload":{"q":2}})")).code == 3);
    const Run bad = run("classify --format json " + quote(R"({"schemaVersion":"1","kind":"gamma_q","payload":{"q":1}})"));
    CHECK(bad.code == 2);
    CHECK(Json::parse(bad.out).at("error").at("path") == "payload.q");
}

TEST_CASE("json output is deterministic and re-parseable")
{
    for (const std::string cmd : {"classify", "series", "fingerprint", "nilclass"}) {
        INFO(cmd);
        const Run a = run(cmd + " --format json " + data("nil4_unipotent3.json"));
        const Run b = run(cmd + " --format json " + data("nil4_unipotent3.json"));
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
        // the embedded input document feeds back into the tool
        const Json input = Json::parse(a.out).at("input");
        const Run c = run(cmd + " --format json " + quote(input.dump()));
        CHECK(c.out == a.out);
    }
}

TEST_CASE("compare records replay")
{
    const Run c = run("compare --format json --bound 12 " + tb("[[0,0,1],[1,0,0],[0,1,1]]") + " " + tb("[[0,0,1],[1,0,-7],[0,1,5]]"));
    REQUIRE(c.code == 0);
    const fs::path rec = temp_file("record.json", c.out);
    const Run r = run("replay --format json " + quote(rec.string()));
    CHECK(r.code == 0);
    CHECK(Json::parse(r.out).at("replayed") == true);

    Json forged = Json::parse(c.out);
    forged["comparison"]["deep"]["invariant"] = "trace";
    const fs::path bad = temp_file("forged.json", forged.dump());
    const Run f = run("replay " + quote(bad.string()));
    CHECK(f.code == 2);
    CHECK(f.out.find("does not replay") != std::string::npos);

    const Run iso = run("compare --format json " + tb("[[0,0,1],[1,0,-6],[0,1,5]]") + " " + tb("[[-6,-5,6],[8,7,-7],[-3,-2,4]]"));
    const fs::path irec = temp_file("iso.json", iso.out);
    CHECK(run("replay " + quote(irec.string())).code == 0);
    fs::remove(rec);
    fs::remove(bad);
    fs::remove(irec);
}

TEST_CASE("batch mode keeps input order")
{
    std::string stream;
    for (const char* f : {"e4_identity.json", "sol4_5_6.json", "nil4_unipotent3.json"}) {
        std::ifstream in(std::string(GEO4_DATA) + "/descriptors/" + f);
        stream += std::string(std::istreambuf_iterator<char>(in), {}) + "\n";
    }
    const fs::path ok = temp_file("batch_ok.json", stream);
    const Run r = run("classify --batch --format json " + quote(ok.string()));
    CHECK(r.code == 0);
    std::vector<std::string> labels;
    std::istringstream lines(r.out);
    for (std::string line; std::getline(lines, line);)
        labels.push_back(Json::parse(line).at("classification").at("label").at("name"));
    CHECK(labels == std::vector<std::string>{"E4", "Sol4_{5,6}", "Nil4"});

    const fs::path mixed =
        temp_file("batch_mixed.json", stream + R"({"schemaVersion":"1","kind":"gamma_q","payload":{"q":0}})" + "\n" +
                                          R"({"schemaVersion":"1","kind":"gamma_q","payload":{"q":3}})");
    const Run m = run("series --batch " + quote(mixed.string()));
    CHECK(m.code == 2);
    std::vector<Json> docs;
    std::istringstream ml(m.out);
    for (std::string line; std::getline(ml, line);) docs.push_back(Json::parse(line));
    REQUIRE(docs.size() == 5);
    CHECK(docs[3].contains("error"));
    CHECK(docs[4].at("lowerCentral").at("length") == 2);
    fs::remove(ok);
    fs::remove(mixed);
}

TEST_CASE("diagnostics go to stderr")
{
    const std::string cmd = "GEO4_LOG=debug " + quote(GEO4_CLI) + " classify --format json " + data("e4_identity.json");
    FILE* p = popen((cmd + " 2>&1 >/dev/null").c_str(), "r");
    REQUIRE(p);
    char buf[4096];
    std::string err;
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) err.append(buf, n);
    CHECK(pclose(p) == 0);
    CHECK(err.find("geo4 [debug]") != std::string::npos);
    CHECK(run("classify --format json " + data("e4_identity.json"), "GEO4_LOG=debug").out ==
          run("classify --format json " + data("e4_identity.json")).out);
}
