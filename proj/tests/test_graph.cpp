#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>

#include "mtqa/errors.hpp"
#include "mtqa/graph.hpp"

using namespace mtqa;

TEST_CASE("p=1 yields the complete graph") {
    auto g = gen_erdos_renyi(3, 1.0, 7);
    CHECK(g.node_count == 3);
    CHECK(g.edges.size() == 3);
    auto h = gen_erdos_renyi(6, 1.0, 99);
    CHECK(h.edges.size() == 15);
}

TEST_CASE("p=0 yields isolated nodes") {
    auto g = gen_erdos_renyi(5, 0.0, 3);
    CHECK(g.node_count == 5);
    CHECK(g.edges.empty());
}

TEST_CASE("same seed reproduces the same graph") {
    auto a = gen_erdos_renyi(40, 0.9, 12345);
    auto b = gen_erdos_renyi(40, 0.9, 12345);
    CHECK(a == b);
    auto c = gen_erdos_renyi(40, 0.9, 12346);
    CHECK(a.edges != c.edges);
}

TEST_CASE("generated graphs always satisfy the invariants") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        for (double p : {0.0, 0.3, 0.9, 1.0}) {
            auto g = gen_erdos_renyi(1 + static_cast<int>(seed % 12), p, seed);
            CHECK_NOTHROW(validate_graph(g));
        }
    }
}

TEST_CASE("edge draws are nested across p for a fixed seed") {
    // each candidate pair consumes one uniform in lexicographic order, so a
    // smaller p keeps a subset of the edges
    auto lo = gen_erdos_renyi(20, 0.3, 77);
    auto hi = gen_erdos_renyi(20, 0.9, 77);
    std::set<std::pair<int, int>> hi_edges(hi.edges.begin(), hi.edges.end());
    for (auto e : lo.edges) CHECK(hi_edges.count(e) == 1);
}

TEST_CASE("empirical density matches p") {
    double total = 0.0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        auto g = gen_erdos_renyi(20, 0.9, 1000 + t);
        total += static_cast<double>(g.edges.size()) / (20 * 19 / 2);
    }
    CHECK(total / trials == doctest::Approx(0.9).epsilon(0.0222));  // within 0.02 absolute
}

TEST_CASE("degree_stats") {
    ProblemGraph triangle{3, {{0, 1}, {0, 2}, {1, 2}}, 0, 0.0};
    auto st = degree_stats(triangle);
    CHECK(st.max_degree == 2);
    CHECK(st.avg_degree == 2.0);

    ProblemGraph star{5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, 0, 0.0};
    auto st2 = degree_stats(star);
    CHECK(st2.max_degree == 4);
    CHECK(st2.avg_degree == doctest::Approx(8.0 / 5.0));

    ProblemGraph empty{5, {}, 0, 0.0};
    auto st3 = degree_stats(empty);
    CHECK(st3.max_degree == 0);
    CHECK(st3.avg_degree == 0.0);
}

TEST_CASE("graph text round trip") {
    auto g = gen_erdos_renyi(9, 0.5, 4242);
    auto text = graph_to_string(g);
    auto back = graph_from_string(text);
    CHECK(back == g);
}

TEST_CASE("save/load through a file") {
    auto g = gen_erdos_renyi(3, 1.0, 1);
    auto path = std::filesystem::temp_directory_path() / "mtqa_graph_rt.txt";
    save_graph(g, path.string());
    CHECK(load_graph(path.string()) == g);
    std::filesystem::remove(path);
}

TEST_CASE("parse errors carry line numbers") {
    CHECK_THROWS_AS(graph_from_string("n 3\n0 1\n0 1\n"), ParseError);
    try {
        graph_from_string("n 3\n0 1\n0 1\n");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(graph_from_string("n 3\n0 5\n"), ParseError);   // index out of range
    CHECK_THROWS_AS(graph_from_string("n 3\n1 1\n"), ParseError);   // self-loop
    CHECK_THROWS_AS(graph_from_string("0 1\n"), ParseError);        // missing header
    CHECK_THROWS_AS(graph_from_string("n 3\n0 1 2\n"), ParseError); // trailing token
}

TEST_CASE("generator argument checks") {
    CHECK_THROWS_AS(gen_erdos_renyi(0, 0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_erdos_renyi(5, 1.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_erdos_renyi(5, -0.1, 1), std::invalid_argument);
}
