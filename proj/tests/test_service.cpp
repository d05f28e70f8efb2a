#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <memory>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "iemo/service.hpp"

using namespace iemo;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json small_config(std::size_t mu = 4) {
    return {{"algorithm", "insga2"},
            {"problem", {{"family", "dtlz2"}, {"m", 3}}},
            {"N", 12},
            {"max_fe", 12 * 9},
            {"tau", 3},
            {"warmup_gens", 2},
            {"mu", mu},
            {"seed", 5},
            {"train", {{"epochs", 40}}}};
}

struct Server {
    explicit Server(const fs::path& root) : service(ServiceOptions{"127.0.0.1", 0, root, {}}) {
        port = service.bind();
        service.start();
        client = std::make_unique<httplib::Client>("127.0.0.1", port);
    }
    ~Server() { service.stop(); }

    std::pair<int, json> call(const std::string& method, const std::string& path, const json& body = nullptr) {
        httplib::Result r = method == "GET"      ? client->Get(path)
                            : method == "DELETE" ? client->Delete(path)
                                                 : client->Post(path, body.is_null() ? std::string() : body.dump(),
                                                                "application/json");
        REQUIRE(r);
        return {r->status, r->body.empty() ? json() : json::parse(r->body)};
    }

    json judge(const std::string& id, std::size_t pair, const std::string& outcome) {
        return call("POST", "/v1/sessions/" + id + "/judgment", {{"pair_index", pair}, {"outcome", outcome}}).second;
    }

    SessionService service;
    int port{0};
    std::unique_ptr<httplib::Client> client;
};

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("iemo_svc_" + name);
    fs::remove_all(p);
    return p;
}

double total(const json& f) {
    double s = 0;
    for (double v : f) s += v;
    return s;
}

// Answers the pending consultation completely, preferring the smaller objective sum.
void answer_all(Server& s, const std::string& id) {
    s.service.manager().wait_until_idle(id);
    while (true) {
        const auto [code, q] = s.call("GET", "/v1/sessions/" + id + "/query");
        REQUIRE(code == 200);
        if (q.at("query").is_null()) return;
        const json& p = q["query"];
        const double a = total(p["a"]["f"]), b = total(p["b"]["f"]);
        s.judge(id, p["pair_index"], a < b ? "better" : (a > b ? "worse" : "indifferent"));
        s.service.manager().wait_until_idle(id);
    }
}

std::vector<json> events(const fs::path& root, const std::string& id) {
    std::ifstream in(root / "sessions" / id / "events.jsonl");
    std::vector<json> out;
    for (std::string line; std::getline(in, line);) out.push_back(json::parse(line));
    return out;
}

}  // namespace

TEST_CASE("session lifecycle over HTTP") {
    const fs::path root = scratch("life");
    Server s(root);

    auto [code, st] = s.call("POST", "/v1/sessions", small_config());
    REQUIRE(code == 201);
    const std::string id = st.at("id");
    CHECK(id.size() == 13);
    CHECK(st.at("max_fe") == 108);
    auto [code2, st2] = s.call("POST", "/v1/sessions", small_config());
    CHECK(code2 == 201);
    CHECK(st2.at("id") != id);

    const auto [lc, listed] = s.call("GET", "/v1/sessions");
    CHECK(lc == 200);
    CHECK(listed.at("sessions").size() == 2);

    const auto [pc, pop] = s.call("GET", "/v1/sessions/" + id + "/population");
    CHECK(pc == 200);
    CHECK(pop.at("size") == 12);
    CHECK(pop.at("members").size() == 12);

    CHECK(s.service.manager().wait_until_idle(id) == SessionPhase::awaiting_judgment);
    const auto [qc, q] = s.call("GET", "/v1/sessions/" + id + "/query");
    CHECK(qc == 200);
    CHECK(q.at("phase") == "awaiting_judgment");
    CHECK(q["query"]["pair_index"] == 0);
    CHECK(q["query"]["total"] == 6);
    CHECK(q["query"]["a"]["f"].size() == 3);

    // out of order, invalid, duplicate
    auto [c1, e1] = s.call("POST", "/v1/sessions/" + id + "/judgment", {{"pair_index", 1}, {"outcome", "better"}});
    CHECK(c1 == 409);
    CHECK(e1.at("code") == "out_of_order");
    auto [c2, e2] = s.call("POST", "/v1/sessions/" + id + "/judgment", {{"pair_index", 0}, {"outcome", "maybe"}});
    CHECK(c2 == 422);
    CHECK(e2.at("field") == "outcome");
    auto [c3, e3] = s.call("POST", "/v1/sessions/" + id + "/judgment", {{"pair_index", 0}, {"outcome", "better"}, {"x", 1}});
    CHECK(c3 == 422);
    const json ack = s.judge(id, 0, "better");
    CHECK(ack.at("accepted") == true);
    CHECK(ack.at("remaining") == 5);
    auto [c4, e4] = s.call("POST", "/v1/sessions/" + id + "/judgment", {{"pair_index", 0}, {"outcome", "worse"}});
    CHECK(c4 == 409);
    CHECK(e4.at("code") == "duplicate_judgment");

    const std::size_t generation = s.call("GET", "/v1/sessions/" + id).second.at("generation");
    answer_all(s, id);
    CHECK(s.service.manager().wait_until_idle(id) == SessionPhase::finished);
    const auto [sc, fin] = s.call("GET", "/v1/sessions/" + id);
    CHECK(sc == 200);
    CHECK(fin.at("phase") == "finished");
    CHECK(fin.at("generation").get<std::size_t>() > generation);
    CHECK(fin.at("fe_used") == 108);
    CHECK(fin.at("consultations").get<std::size_t>() >= 2);
    auto [c5, e5] = s.call("POST", "/v1/sessions/" + id + "/judgment", {{"pair_index", 0}, {"outcome", "better"}});
    CHECK(c5 == 409);
    CHECK(s.call("GET", "/v1/sessions/" + id + "/query").second.at("query").is_null());

    // the event log replays to the consultation records of the finished run
    const auto result = json::parse(std::ifstream(root / "sessions" / id / "result.json"));
    std::vector<json> logged;
    for (const auto& e : events(root, id))
        if (e.at("type") == "judgment") logged.push_back(e);
    std::size_t k = 0;
    for (const auto& c : result.at("consultations"))
        for (const auto& r : c.at("records")) {
            REQUIRE(k < logged.size());
            CHECK(logged[k].at("fi") == r.at("fi"));
            CHECK(logged[k].at("fj") == r.at("fj"));
            CHECK(logged[k].at("c") == r.at("c"));
            ++k;
        }
    CHECK(k == logged.size());
    CHECK(events(root, id).front().at("type") == "created");
    CHECK(events(root, id).back().at("type") == "finished");

    const auto [fp, fpop] = s.call("GET", "/v1/sessions/" + id + "/population");
    REQUIRE(fp == 200);
    REQUIRE(fpop.at("members").size() == result.at("final_population").size());
    for (std::size_t i = 0; i < fpop["members"].size(); ++i)
        CHECK(fpop["members"][i]["f"] == result["final_population"][i]["f"]);

    // abort the second session
    const std::string other = st2.at("id");
    auto [dc, ab] = s.call("DELETE", "/v1/sessions/" + other);
    CHECK(dc == 200);
    CHECK(ab.at("phase") == "aborted");
    CHECK(events(root, other).back().at("type") == "aborted");
    auto [c6, e6] = s.call("POST", "/v1/sessions/" + other + "/judgment", {{"pair_index", 0}, {"outcome", "better"}});
    CHECK(c6 == 409);
    CHECK(e6.at("code") == "session_closed");
    fs::remove_all(root);
}

TEST_CASE("a full consultation of 45 pairs") {
    const fs::path root = scratch("full");
    Server s(root);
    json cfg = small_config(10);
    cfg["N"] = 20;
    cfg["max_fe"] = 20 * 6;
    const std::string id = s.call("POST", "/v1/sessions", cfg).second.at("id");
    REQUIRE(s.service.manager().wait_until_idle(id) == SessionPhase::awaiting_judgment);
    const auto before = s.call("GET", "/v1/sessions/" + id).second;
    CHECK(before["pending"]["total"] == 45);
    for (std::size_t p = 0; p < 45; ++p) {
        const auto q = s.call("GET", "/v1/sessions/" + id + "/query").second;
        REQUIRE(q["query"]["pair_index"] == p);
        CHECK(s.judge(id, p, p % 3 == 0 ? "indifferent" : "better").at("remaining") == 44 - p);
    }
    s.service.manager().wait_until_idle(id);
    const auto after = s.call("GET", "/v1/sessions/" + id).second;
    CHECK(after.at("generation").get<std::size_t>() > before.at("generation").get<std::size_t>());
    CHECK(after.at("judgments") == 45);
    fs::remove_all(root);
}

TEST_CASE("request errors") {
    const fs::path root = scratch("errors");
    Server s(root);
    json bad = small_config();
    bad["problem"]["m"] = 1;
    auto [c1, e1] = s.call("POST", "/v1/sessions", bad);
    CHECK(c1 == 422);
    CHECK(e1.at("code") == "invalid_config");
    CHECK(e1.at("field") == "problem.m");
    bad = small_config();
    bad["problem"]["m"] = "three";
    CHECK(s.call("POST", "/v1/sessions", bad).first == 422);
    bad = small_config();
    bad["speed"] = 3;
    CHECK(s.call("POST", "/v1/sessions", bad).first == 422);

    auto [c2, e2] = s.call("GET", "/v1/sessions/s000000000000");
    CHECK(c2 == 404);
    CHECK(e2.at("code") == "not_found");
    CHECK(s.call("GET", "/v1/sessions/nobody/query").first == 404);
    CHECK(s.call("DELETE", "/v1/sessions/nobody").first == 404);
    CHECK(s.call("POST", "/v1/sessions/nobody/judgment", {{"pair_index", 0}, {"outcome", "better"}}).first == 404);

    httplib::Result r = s.client->Post("/v1/sessions", "{not json", "application/json");
    REQUIRE(r);
    CHECK(r->status == 400);
    CHECK(json::parse(r->body).at("code") == "bad_request");
    fs::remove_all(root);
}

TEST_CASE("a restarted service resumes at the same pending pair") {
    const fs::path root = scratch("restart");
    std::string id;
    json query, population;
    {
        Server s(root);
        id = s.call("POST", "/v1/sessions", small_config()).second.at("id");
        s.service.manager().wait_until_idle(id);
        for (std::size_t p = 0; p < 6; ++p) s.judge(id, p, p % 2 ? "worse" : "better");
        s.service.manager().wait_until_idle(id);
        s.judge(id, 0, "better");
        s.judge(id, 1, "indifferent");
        query = s.call("GET", "/v1/sessions/" + id + "/query").second;
        population = s.call("GET", "/v1/sessions/" + id + "/population").second;
        REQUIRE(query["query"]["pair_index"] == 2);
    }
    Server again(root);
    REQUIRE(again.service.manager().wait_until_idle(id) == SessionPhase::awaiting_judgment);
    CHECK(again.call("GET", "/v1/sessions/" + id + "/query").second == query);
    CHECK(again.call("GET", "/v1/sessions/" + id + "/population").second == population);
    CHECK(again.call("GET", "/v1/sessions").second.at("sessions").size() == 1);
    answer_all(again, id);
    CHECK(again.service.manager().wait_until_idle(id) == SessionPhase::finished);
    fs::remove_all(root);
}
