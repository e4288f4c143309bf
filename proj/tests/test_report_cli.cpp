#include <doctest.h>

#include <array>
#include <cstdio>
#include <sys/wait.h>
#include <fstream>
#include <string>

#include "dhg/report.hpp"
#include "dhg/errors.hpp"

using namespace dhg;

namespace {

std::string run_cmd(const std::string& cmd, int* rc = nullptr) {
    std::array<char, 4096> buf{};
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), p)) out += buf.data();
    int status = pclose(p);
    if (rc) *rc = WEXITSTATUS(status);
    return out;
}

const std::string bin = DHG_BIN;

} // namespace

TEST_CASE("digraph json is canonical and round-trips") {
    digraph g = ingest_edge_list("b a\na b\nc a\na b");
    json j = digraph_to_json(g);
    CHECK(j["vertices"] == json::array({"a", "b", "c"}));
    // lexicographic edges, parallel edge kept
    CHECK(j["edges"].size() == 4);
    CHECK(j["edges"][0] == json::array({"a", "b"}));
    digraph h = digraph_from_json(j);
    CHECK(digraph_to_json(h) == j);
    CHECK(h.edge_count() == 4);
}

TEST_CASE("walk json uses names") {
    digraph g = ingest_edge_list("a b\nb c");
    walk w{g.id_of("a"), g.id_of("b"), g.id_of("c")};
    json j = walk_to_json(g, w);
    CHECK(j == json::array({"a", "b", "c"}));
    CHECK(walk_from_json(g, j) == w);
}

TEST_CASE("fnv hash is stable") {
    CHECK(fnv1a_hex("") == fnv1a_hex(""));
    CHECK(fnv1a_hex("a b\n") != fnv1a_hex("a c\n"));
    CHECK(fnv1a_hex("abc").size() == 16);
}

TEST_CASE("cli: version and usage errors") {
    int rc = 0;
    std::string out = run_cmd(bin + " version", &rc);
    CHECK(rc == 0);
    CHECK(json::parse(out)["tool"] == version_string());

    run_cmd(bin + " dist --family bogus --from a --to b 2>/dev/null", &rc);
    CHECK(rc == 2);
    std::string err = run_cmd(bin + " dist --family bogus --from a --to b 2>&1 >/dev/null", &rc);
    CHECK(json::parse(err)["error"]["kind"] == "usage");

    // expansion errors carry exit code 3
    run_cmd(bin + " boundary relate --family nat --N 20 --r1 nat-ray+40 --r2 nat-ray --M 2 --r 2 2>/dev/null",
            &rc);
    CHECK(rc == 3);
}

TEST_CASE("cli: ingest and gen") {
    std::string path = "/tmp/dhg_test_edges.txt";
    {
        std::ofstream f(path);
        f << "# demo\na b\nb c\nb c\n";
    }
    int rc = 0;
    std::string out = run_cmd(bin + " ingest --input " + path, &rc);
    CHECK(rc == 0);
    json j = json::parse(out);
    CHECK(j["vertex_count"] == 3);
    CHECK(j["edge_count"] == 3);
    CHECK(j["manifest"]["inputs"].contains(path));

    std::string gen = run_cmd(bin + " gen --family nat --radius 2", &rc);
    CHECK(rc == 0);
    json gj = json::parse(gen);
    CHECK(gj["vertex_count"] == 3);
    CHECK(gj["digraph"]["vertices"] == json::array({"0", "1", "2"}));

    // canonical json round-trips through --input
    std::string jpath = "/tmp/dhg_test_graph.json";
    {
        std::ofstream f(jpath);
        f << j["digraph"].dump();
    }
    std::string out2 = run_cmd(bin + " dist --input " + jpath + " --from a --to c", &rc);
    CHECK(rc == 0);
    CHECK(json::parse(out2)["dist"] == 2);
}

TEST_CASE("cli: reports are byte-identical across reruns") {
    for (const std::string cmd :
         {" recipe --name nat-one-point", " delta --family ex-dist0 --radius 7 --mode exact",
          " vismetric --family ex-dist0 --N 12"}) {
        int rc1 = 0, rc2 = 0;
        std::string a = run_cmd(bin + cmd, &rc1);
        std::string b = run_cmd(bin + cmd, &rc2);
        CHECK(rc1 == rc2);
        CHECK(a == b);
        CHECK_FALSE(a.empty());
    }
}

TEST_CASE("cli: qi-check end to end") {
    std::string g1 = "/tmp/dhg_qi_g1.txt", g2 = "/tmp/dhg_qi_g2.txt", spec = "/tmp/dhg_qi_spec.json";
    {
        std::ofstream f(g1);
        f << "a b\nb c\n";
    }
    {
        std::ofstream f(g2);
        f << "a b\nb c\n";
    }
    {
        std::ofstream f(spec);
        f << R"({"map":{"a":"a","b":"b","c":"c"},"gamma":"1","c":"0"})";
    }
    int rc = 0;
    std::string out = run_cmd(bin + " qi-check --input " + g1 + " --input2 " + g2 + " --spec " + spec, &rc);
    CHECK(rc == 0);
    CHECK(json::parse(out)["passed"] == true);

    {
        std::ofstream f(spec);
        f << R"({"map":{"a":"a","b":"a","c":"a"},"gamma":"1","c":"0"})";
    }
    run_cmd(bin + " qi-check --input " + g1 + " --input2 " + g2 + " --spec " + spec + " >/dev/null", &rc);
    CHECK(rc == 1);
}
