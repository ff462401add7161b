#include <gtest/gtest.h>

#include "logsmith/java/parser.hpp"
#include "logsmith/scope/candidates.hpp"

using namespace logsmith;
using namespace logsmith::java;
using namespace logsmith::scope;

namespace {

CodeModel hierarchy_model() {
    CodeModel model;
    parse_source(model, "util/MathUtil.java",
                 "package util;\n"
                 "public class MathUtil {\n"
                 "    public static int clamp(int v, int lo, int hi) { return v; }\n"
                 "    public static int unused(int v) { return v; }\n"
                 "}\n");
    parse_source(model, "app/Base.java",
                 "package app;\n"
                 "public class Base {\n"
                 "    protected int counter;\n"
                 "    protected static int MAX_RETRIES = 3;\n"
                 "    private String secret;\n"
                 "    /** Returns the identifier. */\n"
                 "    public long getId() { return 0; }\n"
                 "    public void overridden() {}\n"
                 "}\n");
    parse_source(model, "app/Notable.java",
                 "package app;\n"
                 "public interface Notable {\n"
                 "    void must();\n"
                 "    default String describe() { return \"n\"; }\n"
                 "}\n");
    parse_source(model, "app/Svc.java",
                 "package app;\n"
                 "import static util.MathUtil.clamp;\n"
                 "import static external.Lib.render;\n"
                 "public class Svc extends Base implements Notable {\n"
                 "    private static final Logger log = LoggerFactory.getLogger(Svc.class);\n"
                 "    private Config config;\n"
                 "    public void overridden() {}\n"
                 "    public void must() {}\n"
                 "    /** Handles one request. */\n"
                 "    long helper(int n) { return n; }\n"
                 "    void work(int amount, String tag) {\n"
                 "        int budget = amount;\n"
                 "        Runnable task = () -> helper(budget);\n"
                 "        for (int i = 0; i < amount; i++) {\n"
                 "            budget--;\n"
                 "        }\n"
                 "        try {\n"
                 "            helper(budget);\n"
                 "        } catch (RuntimeException boom) {\n"
                 "            budget = 0;\n"
                 "        }\n"
                 "    }\n"
                 "}\n");
    model.rebuild_indexes();
    return model;
}

const MethodUnit& method_named(const CodeModel& m, const std::string& name) {
    for (auto& mu : m.methods)
        if (mu.name == name) return mu;
    throw std::runtime_error("no method " + name);
}

std::vector<std::string> names(const std::vector<CandidateEntry>& entries) {
    std::vector<std::string> out;
    for (const auto& e : entries) out.push_back(e.name);
    return out;
}

}  // namespace

TEST(Candidates, parameters_match_signature_order) {
    auto model = hierarchy_model();
    CandidateSet cs = collect_candidates(model, method_named(model, "work"));
    ASSERT_EQ(cs.v_p.size(), 2u);
    EXPECT_EQ(cs.v_p[0].name, "amount");
    EXPECT_EQ(cs.v_p[0].type, "int");
    EXPECT_EQ(cs.v_p[1].name, "tag");
    EXPECT_EQ(cs.v_p[1].type, "String");
}

TEST(Candidates, locals_include_loop_and_catch_variables) {
    auto model = hierarchy_model();
    CandidateSet cs = collect_candidates(model, method_named(model, "work"));
    auto v = names(cs.v_m);
    EXPECT_NE(std::find(v.begin(), v.end(), "budget"), v.end());
    EXPECT_NE(std::find(v.begin(), v.end(), "task"), v.end());
    EXPECT_NE(std::find(v.begin(), v.end(), "i"), v.end());
    EXPECT_NE(std::find(v.begin(), v.end(), "boom"), v.end());
    for (const auto& e : cs.v_m)
        if (e.name == "boom") EXPECT_EQ(e.type, "RuntimeException");
}

TEST(Candidates, member_static_and_inherited_fields) {
    auto model = hierarchy_model();
    CandidateSet cs = collect_candidates(model, method_named(model, "work"));
    EXPECT_EQ(names(cs.v_c), std::vector<std::string>{"config"});
    // own static logger + inherited static counter limit
    auto stat = names(cs.v_s);
    EXPECT_EQ(stat, (std::vector<std::string>{"MAX_RETRIES", "log"}));
    // non-static inherited fields, including private ones we cannot see through
    auto inh = names(cs.v_i);
    EXPECT_EQ(inh, (std::vector<std::string>{"counter", "secret"}));
    for (const auto& e : cs.v_i) EXPECT_EQ(e.scope, "app.Base");
}

TEST(Candidates, function_sets_respect_overrides) {
    auto model = hierarchy_model();
    CandidateSet cs = collect_candidates(model, method_named(model, "work"));
    // member methods: everything declared here except the target itself
    EXPECT_EQ(names(cs.f_m), (std::vector<std::string>{"helper", "must", "overridden"}));
    // inherited: getId yes, overridden() suppressed by the redeclaration
    EXPECT_EQ(names(cs.f_i), std::vector<std::string>{"getId"});
    EXPECT_EQ(cs.f_i[0].summary, "Returns the identifier.");
    // interface default methods
    EXPECT_EQ(names(cs.f_d), std::vector<std::string>{"describe"});
    // lambda-assigned local
    EXPECT_EQ(names(cs.f_l), std::vector<std::string>{"task"});
}

TEST(Candidates, static_imports_resolved_and_unresolved) {
    auto model = hierarchy_model();
    CandidateSet cs = collect_candidates(model, method_named(model, "work"));
    ASSERT_EQ(cs.f_s.size(), 2u);
    EXPECT_EQ(cs.f_s[0].name, "clamp");
    EXPECT_FALSE(cs.f_s[0].unresolved);
    EXPECT_EQ(cs.f_s[0].scope, "util.MathUtil");
    EXPECT_EQ(cs.f_s[1].name, "render");
    EXPECT_TRUE(cs.f_s[1].unresolved);
    EXPECT_EQ(cs.f_s[1].scope, "external.Lib");
}

TEST(Candidates, unresolvable_supertype_shrinks_sets_with_diagnostic) {
    CodeModel model;
    parse_source(model, "A.java",
                 "public class A extends com.vendor.Widget {\n"
                 "    void f() { int x = 1; }\n"
                 "}\n");
    model.rebuild_indexes();
    CandidateSet cs = collect_candidates(model, method_named(model, "f"));
    EXPECT_TRUE(cs.v_i.empty());
    EXPECT_TRUE(cs.f_i.empty());
    ASSERT_EQ(cs.diagnostics.size(), 1u);
    EXPECT_NE(cs.diagnostics[0].find("com.vendor.Widget"), std::string::npos);
}

TEST(Candidates, rendering_order_and_labels) {
    auto model = hierarchy_model();
    CandidateSet cs = collect_candidates(model, method_named(model, "work"));
    std::string text = render_candidates(cs);
    // label spot checks, per the rendering contract
    EXPECT_NE(text.find("parameter: int amount"), std::string::npos);
    EXPECT_NE(text.find("local variable: int budget"), std::string::npos);
    EXPECT_NE(text.find("class member: Config config"), std::string::npos);
    EXPECT_NE(text.find("inherited variable: int counter (from app.Base)"), std::string::npos);
    EXPECT_NE(text.find("member method: long helper(int n) -- Handles one request."),
              std::string::npos);
    EXPECT_NE(text.find("interface default method: String describe()"), std::string::npos);
    EXPECT_NE(text.find("lambda or function variable: Runnable task"), std::string::npos);
    EXPECT_NE(text.find("statically imported method:"), std::string::npos);
    // set order: parameters before locals before members before methods
    EXPECT_LT(text.find("parameter:"), text.find("local variable:"));
    EXPECT_LT(text.find("local variable:"), text.find("class member:"));
    EXPECT_LT(text.find("class member:"), text.find("member method:"));
    EXPECT_LT(text.find("member method:"), text.find("statically imported method:"));
    // determinism
    EXPECT_EQ(text, render_candidates(collect_candidates(model, method_named(model, "work"))));
}

TEST(Candidates, alphabetical_within_set) {
    CodeModel model;
    parse_source(model, "A.java",
                 "public class A {\n"
                 "    void f() {\n"
                 "        int zeta = 1;\n"
                 "        int alpha = 2;\n"
                 "    }\n"
                 "}\n");
    model.rebuild_indexes();
    CandidateSet cs = collect_candidates(model, method_named(model, "f"));
    EXPECT_EQ(names(cs.v_m), (std::vector<std::string>{"alpha", "zeta"}));
    std::string text = render_candidates(cs);
    EXPECT_LT(text.find("alpha"), text.find("zeta"));
}

TEST(Candidates, empty_set_sentinel) {
    CandidateSet cs;
    EXPECT_TRUE(cs.empty());
    EXPECT_EQ(render_candidates(cs), "no candidates\n");
}

TEST(Candidates, json_shape) {
    auto model = hierarchy_model();
    CandidateSet cs = collect_candidates(model, method_named(model, "work"));
    nlohmann::json j = candidates_to_json(cs);
    EXPECT_EQ(j["method"], cs.method_id);
    EXPECT_EQ(j["v_p"].size(), 2u);
    EXPECT_EQ(j["v_p"][0]["name"], "amount");
    EXPECT_TRUE(j["f_s"][1]["unresolved"].get<bool>());
    EXPECT_TRUE(j.contains("diagnostics"));
}
