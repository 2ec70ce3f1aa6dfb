#include "io/formats.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "json.hpp"

namespace bedsim {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void writeText(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::Io, "cannot open for writing: " + path);
    out << text;
    require(out.good(), ErrorCode::Io, "write failed: " + path);
}

std::string readText(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::Io, "cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    require(!j.is_discarded(), ErrorCode::Io, "malformed JSON in " + what);
    return j;
}

}  // namespace

std::string frameToJson(const ClothMesh& mesh) {
    json j;
    j["schema"] = "bedsim-frame-1";
    j["timestamp"] = mesh.time;
    j["rows"] = mesh.rows;
    j["cols"] = mesh.cols;
    json pos = json::array();
    for (const Vec3& p : mesh.positions) pos.push_back({p.x, p.y, p.z});
    j["positions"] = std::move(pos);
    json anchors = json::array();
    for (const auto& [v, target] : mesh.anchors)
        anchors.push_back({{"vertex", v}, {"target", {target.x, target.y, target.z}}});
    j["anchors"] = std::move(anchors);
    return j.dump();
}

void writeFrameFile(const ClothMesh& mesh, const std::string& path) {
    writeText(path, frameToJson(mesh) + "\n");
}

ClothMesh readFrameFile(const std::string& path) {
    json j = parse(readText(path), path);
    require(j.value("schema", "") == "bedsim-frame-1", ErrorCode::Io,
            "unexpected frame schema in " + path);
    ClothMesh mesh;
    mesh.rows = j.at("rows").get<int>();
    mesh.cols = j.at("cols").get<int>();
    mesh.time = j.at("timestamp").get<double>();
    for (const auto& p : j.at("positions"))
        mesh.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>(),
                                  p.at(2).get<double>()});
    require(int(mesh.positions.size()) == mesh.rows * mesh.cols, ErrorCode::Io,
            "frame vertex count does not match grid shape in " + path);
    mesh.velocities.assign(mesh.positions.size(), Vec3{});
    for (const auto& a : j.at("anchors")) {
        const auto& t = a.at("target");
        mesh.anchors[a.at("vertex").get<int>()] = {t.at(0).get<double>(),
                                                   t.at(1).get<double>(),
                                                   t.at(2).get<double>()};
    }
    return mesh;
}

EpisodeRecord makeEpisodeRecord(std::uint64_t seed, TargetName target,
                                const Observation& obs, const Action& requested,
                                const EpisodeOutcome& outcome) {
    EpisodeRecord rec;
    rec.seed = seed;
    rec.target = targetName(target);
    rec.observation = obs.values;
    rec.action = requested.asArray();
    rec.executed = outcome.executed.asArray();
    rec.rho_t = outcome.report.rho_t;
    rec.rho_n = outcome.report.rho_n;
    rec.rho_h = outcome.report.rho_h;
    rec.n_t = outcome.report.n_t;
    rec.n_n = outcome.report.n_n;
    rec.n_h = outcome.report.n_h;
    rec.r_target = outcome.reward.r_target;
    rec.r_nontarget = outcome.reward.r_nontarget;
    rec.r_head = outcome.reward.r_head;
    rec.r_distance = outcome.reward.r_distance;
    rec.reward = outcome.reward.total;
    rec.clamped = outcome.clamped;
    rec.settled = outcome.settled;
    return rec;
}

std::string episodeRecordToJson(const EpisodeRecord& rec) {
    json j;
    j["seed"] = rec.seed;
    j["target"] = rec.target;
    j["observation"] = rec.observation;
    j["action"] = rec.action;
    j["executed"] = rec.executed;
    j["counts"] = {{"rho_t", rec.rho_t}, {"rho_n", rec.rho_n}, {"rho_h", rec.rho_h},
                   {"n_t", rec.n_t},     {"n_n", rec.n_n},     {"n_h", rec.n_h}};
    j["reward"] = {{"target", rec.r_target},
                   {"nontarget", rec.r_nontarget},
                   {"head", rec.r_head},
                   {"distance", rec.r_distance},
                   {"total", rec.reward}};
    j["flags"] = {{"clamped", rec.clamped}, {"settled", rec.settled}};
    return j.dump();
}

EpisodeRecord episodeRecordFromJson(const std::string& line) try {
    json j = parse(line, "episode record");
    EpisodeRecord rec;
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.target = j.at("target").get<std::string>();
    auto obs = j.at("observation");
    require(obs.size() == 12, ErrorCode::Io, "episode record: observation arity");
    for (int i = 0; i < 12; ++i) rec.observation[i] = obs.at(i).get<double>();
    auto act = j.at("action");
    auto exe = j.at("executed");
    require(act.size() == 4 && exe.size() == 4, ErrorCode::Io,
            "episode record: action arity");
    for (int i = 0; i < 4; ++i) {
        rec.action[i] = act.at(i).get<double>();
        rec.executed[i] = exe.at(i).get<double>();
    }
    const auto& c = j.at("counts");
    rec.rho_t = c.at("rho_t").get<int>();
    rec.rho_n = c.at("rho_n").get<int>();
    rec.rho_h = c.at("rho_h").get<int>();
    rec.n_t = c.at("n_t").get<int>();
    rec.n_n = c.at("n_n").get<int>();
    rec.n_h = c.at("n_h").get<int>();
    const auto& r = j.at("reward");
    rec.r_target = r.at("target").get<double>();
    rec.r_nontarget = r.at("nontarget").get<double>();
    rec.r_head = r.at("head").get<double>();
    rec.r_distance = r.at("distance").get<double>();
    rec.reward = r.at("total").get<double>();
    const auto& f = j.at("flags");
    rec.clamped = f.at("clamped").get<bool>();
    rec.settled = f.at("settled").get<bool>();
    return rec;
} catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("episode record: ") + e.what());
}

void writeEpisodeLog(const std::vector<EpisodeRecord>& records, const std::string& path) {
    std::string text;
    for (const EpisodeRecord& rec : records) text += episodeRecordToJson(rec) + "\n";
    writeText(path, text);
}

std::vector<EpisodeRecord> readEpisodeLog(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::Io, "cannot open: " + path);
    std::vector<EpisodeRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(episodeRecordFromJson(line));
    }
    return records;
}

std::string resultsToCsv(const std::vector<ComparisonRow>& rows) {
    std::string out = "target,condition,trials,TP,FP,FN,F1,mean_reward,std_reward\n";
    for (const ComparisonRow& row : rows) {
        const Metrics& m = row.metrics;
        out += std::string(targetName(row.target)) + "," + conditionName(row.condition) +
               "," + std::to_string(m.trials.size()) + "," + std::to_string(m.pooled.tp) +
               "," + std::to_string(m.pooled.fp) + "," + std::to_string(m.pooled.fn) +
               "," + fmt(m.f1_pooled) + "," + fmt(m.mean_reward) + "," +
               fmt(m.std_reward) + "\n";
    }
    return out;
}

std::string resultsToMarkdown(const std::vector<ComparisonRow>& rows) {
    char buf[160];
    std::string out =
        "| Target | Condition | Trials | F1 (pooled) | F1 (mean) | Reward |\n"
        "|---|---|---:|---:|---:|---:|\n";
    for (const ComparisonRow& row : rows) {
        const Metrics& m = row.metrics;
        std::snprintf(buf, sizeof buf, "| %s | %s | %zu | %.3f | %.3f | %.1f ± %.1f |\n",
                      targetName(row.target), conditionName(row.condition),
                      m.trials.size(), m.f1_pooled, m.f1_mean, m.mean_reward,
                      m.std_reward);
        out += buf;
    }
    return out;
}

void writeResults(const std::vector<ComparisonRow>& rows, const std::string& csv_path,
                  const std::string& markdown_path) {
    writeText(csv_path, resultsToCsv(rows));
    writeText(markdown_path, resultsToMarkdown(rows));
}

}  // namespace bedsim
