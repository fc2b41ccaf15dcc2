#include "doctest.h"

#include "vecseg/error.hpp"
#include "vecseg/svg/path_data.hpp"

using namespace vecseg;

namespace {

using PC = PathCommand;

ErrorKind error_kind(std::string_view d) {
    try {
        canonicalize_commands(d);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("relative square from the shape figure") {
    const auto cmds = canonicalize_commands("m 0,0 v 1 h 1 v -1 Z");
    const std::vector<PC> expect{PC::move_to({0, 0}), PC::line_to({0, 1}), PC::line_to({1, 1}), PC::line_to({1, 0}), PC::close()};
    CHECK(cmds == expect);
    CHECK(canonicalize_commands("M 0,0 V 1 H 1 V 0 Z") == expect);
}

TEST_CASE("implicit repeats and H expansion") {
    CHECK(canonicalize_commands("M 0,0 l 1,1 1,1") ==
          std::vector<PC>{PC::move_to({0, 0}), PC::line_to({1, 1}), PC::line_to({2, 2})});
    CHECK(canonicalize_commands("M 0,0 H 5") == std::vector<PC>{PC::move_to({0, 0}), PC::line_to({5, 0})});
    // pairs after a moveto are linetos
    CHECK(canonicalize_commands("m 1 1 2 2") == std::vector<PC>{PC::move_to({1, 1}), PC::line_to({3, 3})});
}

TEST_CASE("smooth curves reflect the previous control point") {
    const auto c = canonicalize_commands("M0 0 C 1 1 2 1 3 0 S 5 -1 6 0");
    REQUIRE(c.size() == 3);
    CHECK(c[2] == PC::cubic_to({4, -1}, {5, -1}, {6, 0}));
    // S without a preceding curve uses the current point
    CHECK(canonicalize_commands("M0 0 S 1 1 2 0")[1] == PC::cubic_to({0, 0}, {1, 1}, {2, 0}));

    const auto q = canonicalize_commands("M0 0 Q 1 1 2 0 T 4 0");
    REQUIRE(q.size() == 3);
    CHECK(q[2] == PC::quad_to({3, -1}, {4, 0}));
    CHECK(canonicalize_commands("M0 0 t 2 0")[1] == PC::quad_to({0, 0}, {2, 0}));
}

TEST_CASE("arcs: packed flags, relative endpoints, zero radius") {
    CHECK(canonicalize_commands("M0 0 a1 1 0 011 1")[1] == PC::arc_to(1, 1, 0, false, true, {1, 1}));
    CHECK(canonicalize_commands("M0 0 A 0 1 0 0 1 3 4")[1] == PC::line_to({3, 4}));
}

TEST_CASE("drawing after Z restarts at the subpath start") {
    const auto c = canonicalize_commands("M 1 1 L 2 1 Z l 1 0");
    const std::vector<PC> expect{PC::move_to({1, 1}), PC::line_to({2, 1}), PC::close(), PC::move_to({1, 1}),
                                 PC::line_to({2, 1})};
    CHECK(c == expect);
}

TEST_CASE("number syntax") {
    const auto c = canonicalize_commands("M.5.5L-1e1,+2E-1");
    CHECK(c[0] == PC::move_to({0.5, 0.5}));
    CHECK(c[1] == PC::line_to({-10, 0.2}));
}

TEST_CASE("bad path data") {
    CHECK(error_kind("L 1 1") == ErrorKind::BadPathData);
    CHECK(error_kind("M 0 0 L 1") == ErrorKind::BadPathData);
    CHECK(error_kind("M 0 0 X 1 1") == ErrorKind::BadPathData);
    CHECK(error_kind("M 0 0 A 1 1 0 2 0 1 1") == ErrorKind::BadPathData);
    try {
        canonicalize_commands("M 0 0 L 1 q");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("offset") != std::string::npos);
    }
}

TEST_CASE("path data writer round trips") {
    const auto c = canonicalize_commands("M 0.1 -0 C 1 2 3 4 5 6 Q 1 1 2 2 A 3 4 30 1 0 7 8 Z");
    const std::string d = to_path_data(c);
    CHECK(d.find("-0 ") == std::string::npos);
    CHECK(canonicalize_commands(d) == c);
}

TEST_CASE("command arity is enforced") {
    const double two[] = {1, 2};
    CHECK_THROWS_AS(PathCommand(CommandKind::C, two), Error);
    CHECK(arity(CommandKind::A) == 7);
    CHECK(arity(CommandKind::H) == 1);
    CHECK(arity(CommandKind::Z) == 0);
}
