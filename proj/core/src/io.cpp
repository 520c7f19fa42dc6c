#include "episim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace episim::io {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

}  // namespace

std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("fmt: conversion failed");
    return {buf, ptr};
}

void save_deployment(const Deployment& dep, const std::string& path) {
    auto out = open_out(path);
    out << "# deployment N=" << dep.size() << " w=" << fmt(dep.width)
        << " h=" << fmt(dep.height) << " rs=" << fmt(dep.r_s) << " rt=" << fmt(dep.r_t)
        << "\n";
    for (std::size_t i = 0; i < dep.size(); ++i)
        out << i << " " << fmt(dep.positions[i].x) << " " << fmt(dep.positions[i].y) << "\n";
}

Deployment load_deployment(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("deployment file empty: " + path);
    Deployment dep;
    std::size_t n = 0;
    {
        std::istringstream hs(line);
        std::string hash, tag;
        hs >> hash >> tag;
        if (hash != "#" || tag != "deployment")
            throw std::runtime_error("bad deployment header: " + path);
        std::string kv;
        while (hs >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("bad deployment header field: " + kv);
            const std::string key = kv.substr(0, eq);
            const double value = std::stod(kv.substr(eq + 1));
            if (key == "N") n = static_cast<std::size_t>(value);
            else if (key == "w") dep.width = value;
            else if (key == "h") dep.height = value;
            else if (key == "rs") dep.r_s = value;
            else if (key == "rt") dep.r_t = value;
            else throw std::runtime_error("unknown deployment header key: " + key);
        }
    }
    dep.positions.resize(n);
    std::vector<bool> seen(n, false);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::size_t id;
        double x, y;
        if (!(ls >> id >> x >> y))
            throw std::runtime_error("bad deployment row: " + line);
        if (id >= n || seen[id])
            throw std::runtime_error("bad or duplicate node id in: " + path);
        seen[id] = true;
        dep.positions[id] = {x, y};
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!seen[i]) throw std::runtime_error("missing node id in: " + path);
    dep.validate();
    return dep;
}

void save_matrix_csv(const CorrelationMatrix& m, const std::string& path) {
    auto out = open_out(path);
    for (std::size_t j = 0; j < m.n; ++j) out << (j ? "," : "") << j;
    out << "\n";
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = 0; j < m.n; ++j)
            out << (j ? "," : "") << fmt(m.at(i, j));
        out << "\n";
    }
}

void save_weights_csv(const CorrelationWeights& w, const std::string& path) {
    auto out = open_out(path);
    out << "# w_theta=" << fmt(w.w_theta) << "\n";
    out << "node_id,w\n";
    for (std::size_t i = 0; i < w.w.size(); ++i)
        out << i << "," << fmt(w.w[i]) << "\n";
}

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
    auto out = open_out(path);
    const auto& p = traj.params;
    out << "# model=" << to_string(traj.kind) << "\n";
    out << "# beta=" << fmt(p.beta) << " sigma=" << fmt(p.sigma) << " rt=" << fmt(p.r_t)
        << " N=" << fmt(p.n_total) << " w_theta=" << fmt(p.w_theta)
        << " lambda=" << fmt(p.lambda) << " p=" << fmt(p.p) << " i0=" << fmt(p.i0)
        << " dt=" << fmt(traj.dt) << "\n";
    out << "t,S,I\n";
    for (const auto& s : traj.samples)
        out << fmt(s.t) << "," << fmt(s.s) << "," << fmt(s.i) << "\n";
}

Trajectory load_trajectory_csv(const std::string& path) {
    auto in = open_in(path);
    Trajectory traj;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string kv;
            while (hs >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = kv.substr(0, eq);
                const std::string value = kv.substr(eq + 1);
                if (key == "model") traj.kind = model_kind_from_string(value);
                else if (key == "beta") traj.params.beta = std::stod(value);
                else if (key == "sigma") traj.params.sigma = std::stod(value);
                else if (key == "rt") traj.params.r_t = std::stod(value);
                else if (key == "N") traj.params.n_total = std::stod(value);
                else if (key == "w_theta") traj.params.w_theta = std::stod(value);
                else if (key == "lambda") traj.params.lambda = std::stod(value);
                else if (key == "p") traj.params.p = std::stod(value);
                else if (key == "i0") traj.params.i0 = std::stod(value);
                else if (key == "dt") traj.dt = std::stod(value);
            }
            continue;
        }
        if (!header_seen) {
            if (line != "t,S,I")
                throw std::runtime_error("unexpected trajectory header in " + path + ": " + line);
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        EpidemicState s;
        std::getline(ls, cell, ',');
        s.t = std::stod(cell);
        std::getline(ls, cell, ',');
        s.s = std::stod(cell);
        std::getline(ls, cell, ',');
        s.i = std::stod(cell);
        traj.samples.push_back(s);
    }
    if (!header_seen) throw std::runtime_error("no t,S,I header in " + path);
    return traj;
}

void save_clusters_csv(const ClusterResult& result, const std::string& members_path,
                       const std::string& summary_path) {
    {
        auto out = open_out(members_path);
        out << "set_id,node_id\n";
        for (std::size_t k = 0; k < result.sets.size(); ++k)
            for (std::size_t id : result.sets[k]) out << k << "," << id << "\n";
        for (std::size_t id : result.singletons) out << "-1," << id << "\n";
    }
    {
        auto out = open_out(summary_path);
        out << "set_id,r_cc,size\n";
        for (std::size_t k = 0; k < result.sets.size(); ++k)
            out << k << "," << fmt(result.radii[k]) << "," << result.sets[k].size() << "\n";
    }
}

void save_rcc_table_csv(const RccTable& table, const std::string& path) {
    auto out = open_out(path);
    out << "r_t";
    for (double xi : table.xi_values) out << ",xi=" << fmt(xi);
    out << "\n";
    for (std::size_t r = 0; r < table.r_t_values.size(); ++r) {
        out << fmt(table.r_t_values[r]);
        for (std::size_t c = 0; c < table.xi_values.size(); ++c)
            out << "," << fmt(table.at(r, c));
        out << "\n";
    }
}

void save_abm_csv(const AbmResult& result, double dt, const std::string& path) {
    auto out = open_out(path);
    out << "step,t,S_mean,I_mean,Q_mean,S_std,I_std\n";
    for (std::size_t k = 0; k < result.s_mean.size(); ++k)
        out << k << "," << fmt(static_cast<double>(k) * dt) << "," << fmt(result.s_mean[k])
            << "," << fmt(result.i_mean[k]) << "," << fmt(result.q_mean[k]) << ","
            << fmt(result.s_std[k]) << "," << fmt(result.i_std[k]) << "\n";
}

void save_abm_replications_csv(const AbmResult& result, double dt,
                               const std::string& path_prefix) {
    for (std::size_t r = 0; r < result.replications.size(); ++r) {
        auto out = open_out(path_prefix + "rep" + std::to_string(r) + ".csv");
        out << "step,t,S,I,Q,ever_infected\n";
        const auto& trace = result.replications[r];
        for (std::size_t k = 0; k < trace.counts.size(); ++k) {
            const auto& c = trace.counts[k];
            out << k << "," << fmt(static_cast<double>(k) * dt) << "," << c.susceptible
                << "," << c.infected << "," << c.quarantined << "," << c.ever_infected
                << "\n";
        }
    }
}

std::string abm_summary_json(const AbmResult& result) {
    nlohmann::ordered_json j;
    j["attack_rate"] = result.attack_rate;
    j["replications"] = result.replications.size();
    auto& ttf = j["time_to_fraction"];
    ttf = nlohmann::ordered_json::array();
    for (const auto& t : result.time_to_fraction) {
        nlohmann::ordered_json e;
        e["fraction"] = t.fraction;
        if (std::isnan(t.mean_step))
            e["mean_step"] = nullptr;
        else
            e["mean_step"] = t.mean_step;
        e["reached"] = t.reached;
        ttf.push_back(e);
    }
    return j.dump(2) + "\n";
}

void save_audit_log(const std::vector<TransmissionEvent>& events, const std::string& path) {
    auto out = open_out(path);
    for (const auto& e : events)
        out << e.step << "," << e.src << "," << e.dst << ",infect\n";
}

}  // namespace episim::io
