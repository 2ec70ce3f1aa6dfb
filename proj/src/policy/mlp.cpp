#include "policy/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace bedsim {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5*ln(2*pi)

double activate(double x, Activation a) {
    return a == Activation::ReLU ? (x > 0.0 ? x : 0.0) : std::tanh(x);
}

double activateGrad(double pre, double post, Activation a) {
    return a == Activation::ReLU ? (pre > 0.0 ? 1.0 : 0.0) : 1.0 - post * post;
}

void initLayer(std::vector<double>& W, std::vector<double>& b, int in, int out, Rng& rng) {
    double bound = 1.0 / std::sqrt(double(in));
    W.resize(std::size_t(out) * in);
    b.assign(out, 0.0);
    for (double& w : W) w = rng.uniform(-bound, bound);
}

PolicyModel makeModel(PolicyModel::Mode mode, std::vector<int> sizes, Activation act,
                      std::uint64_t seed) {
    PolicyModel m;
    m.mode = mode;
    m.sizes = std::move(sizes);
    m.hidden_act = act;
    Rng rng = Rng::derive(seed, 42);
    int layers = m.layerCount();
    m.W.resize(layers);
    m.b.resize(layers);
    for (int l = 0; l < layers; ++l)
        initLayer(m.W[l], m.b[l], m.sizes[l], m.sizes[l + 1], rng);
    if (mode == PolicyModel::Mode::Ppo) {
        int h = m.sizes[layers - 1];
        double bound = 1.0 / std::sqrt(double(h));
        m.value_w.resize(h);
        for (double& w : m.value_w) w = rng.uniform(-bound, bound);
        m.value_b = 0.0;
        m.log_std.fill(std::log(0.3));
    }
    return m;
}

// forward pass retaining every layer's pre-activation and activation
struct Trace {
    std::vector<std::vector<double>> pre;   // per layer
    std::vector<std::vector<double>> post;  // post[0] is the input
    double value = 0.0;
};

void runForward(const PolicyModel& m, const double* input, Trace& t) {
    int layers = m.layerCount();
    t.pre.assign(layers, {});
    t.post.assign(layers + 1, {});
    t.post[0].assign(input, input + m.sizes[0]);
    for (int l = 0; l < layers; ++l) {
        int in = m.sizes[l], out = m.sizes[l + 1];
        t.pre[l].assign(out, 0.0);
        t.post[l + 1].assign(out, 0.0);
        for (int o = 0; o < out; ++o) {
            double v = m.b[l][o];
            const double* row = &m.W[l][std::size_t(o) * in];
            for (int i = 0; i < in; ++i) v += row[i] * t.post[l][i];
            t.pre[l][o] = v;
            // the trunk output stays linear; tanh squashing happens outside
            t.post[l + 1][o] = l + 1 == layers ? v : activate(v, m.hidden_act);
        }
    }
    if (m.mode == PolicyModel::Mode::Ppo) {
        const std::vector<double>& h = t.post[layers - 1];
        double v = m.value_b;
        for (std::size_t i = 0; i < m.value_w.size(); ++i) v += m.value_w[i] * h[i];
        t.value = v;
    }
}

struct GradBuffers {
    std::vector<std::vector<double>> dW;
    std::vector<std::vector<double>> db;
    std::vector<double> d_value_w;
    double d_value_b = 0.0;
    std::array<double, 4> d_log_std{};

    void init(const PolicyModel& m) {
        int layers = m.layerCount();
        dW.resize(layers);
        db.resize(layers);
        for (int l = 0; l < layers; ++l) {
            dW[l].assign(m.W[l].size(), 0.0);
            db[l].assign(m.b[l].size(), 0.0);
        }
        d_value_w.assign(m.value_w.size(), 0.0);
        d_value_b = 0.0;
        d_log_std.fill(0.0);
    }
};

// accumulate gradients for one sample given d loss / d trunk-output (and for
// ppo, d loss / d value)
void backprop(const PolicyModel& m, const Trace& t, const std::vector<double>& d_out,
              double d_value, GradBuffers& g) {
    int layers = m.layerCount();
    std::vector<double> delta = d_out;  // d loss / d pre of current layer
    for (int l = layers - 1; l >= 0; --l) {
        int in = m.sizes[l], out = m.sizes[l + 1];
        // value head feeds off the last hidden activation (input of the final
        // trunk layer)
        if (m.mode == PolicyModel::Mode::Ppo && l == layers - 1 && d_value != 0.0) {
            for (int i = 0; i < in; ++i) g.d_value_w[i] += d_value * t.post[l][i];
            g.d_value_b += d_value;
        }
        for (int o = 0; o < out; ++o) {
            double d = delta[o];
            if (d == 0.0) continue;
            double* grow = &g.dW[l][std::size_t(o) * in];
            const double* a = t.post[l].data();
            for (int i = 0; i < in; ++i) grow[i] += d * a[i];
            g.db[l][o] += d;
        }
        if (l == 0) break;
        std::vector<double> prev(in, 0.0);
        for (int o = 0; o < out; ++o) {
            double d = delta[o];
            if (d == 0.0) continue;
            const double* row = &m.W[l][std::size_t(o) * in];
            for (int i = 0; i < in; ++i) prev[i] += d * row[i];
        }
        if (m.mode == PolicyModel::Mode::Ppo && l == layers - 1 && d_value != 0.0) {
            for (int i = 0; i < in; ++i) prev[i] += d_value * m.value_w[i];
        }
        for (int i = 0; i < in; ++i)
            prev[i] *= activateGrad(t.pre[l - 1][i], t.post[l][i], m.hidden_act);
        delta = std::move(prev);
    }
}

void flatten(const PolicyModel& m, const GradBuffers& g, std::vector<double>& out) {
    out.clear();
    for (int l = 0; l < m.layerCount(); ++l) {
        out.insert(out.end(), g.dW[l].begin(), g.dW[l].end());
        out.insert(out.end(), g.db[l].begin(), g.db[l].end());
    }
    if (m.mode == PolicyModel::Mode::Ppo) {
        out.insert(out.end(), g.d_value_w.begin(), g.d_value_w.end());
        out.push_back(g.d_value_b);
        out.insert(out.end(), g.d_log_std.begin(), g.d_log_std.end());
    }
}

}  // namespace

const std::array<double, 4>& PolicyModel::actionHalfRange() {
    static const std::array<double, 4> half = {Action::kMaxX, Action::kMaxY,
                                               Action::kMaxX, Action::kMaxY};
    return half;
}

PolicyModel makeSupervisedModel(std::uint64_t seed) {
    return makeModel(PolicyModel::Mode::Supervised, {12, 32, 32, 4}, Activation::ReLU,
                     seed);
}

PolicyModel makePpoModel(std::uint64_t seed) {
    return makeModel(PolicyModel::Mode::Ppo, {12, 50, 50, 4}, Activation::Tanh, seed);
}

ForwardResult forward(const PolicyModel& model, const Observation& obs) {
    requireArg(model.sizes.front() == 12 && model.sizes.back() == 4,
               "policy trunk must map 12 inputs to 4 outputs");
    Trace t;
    runForward(model, obs.values.data(), t);
    ForwardResult r;
    const auto& half = PolicyModel::actionHalfRange();
    std::array<double, 4> a{};
    for (int i = 0; i < 4; ++i) {
        r.pre[i] = t.post.back()[i];
        a[i] = half[i] * std::tanh(r.pre[i]);
    }
    r.action = Action::fromArray(a);
    r.value = t.value;
    return r;
}

Action act(const PolicyModel& model, const Observation& obs, bool deterministic,
           Rng& rng) {
    ForwardResult f = forward(model, obs);
    if (deterministic) return f.action;
    const auto& half = PolicyModel::actionHalfRange();
    std::array<double, 4> a{};
    for (int i = 0; i < 4; ++i) {
        double u = f.pre[i] + std::exp(model.log_std[i]) * rng.normal();
        a[i] = half[i] * std::tanh(u);
    }
    return Action::fromArray(a).clamped();
}

int paramCount(const PolicyModel& model) {
    int n = 0;
    for (int l = 0; l < model.layerCount(); ++l)
        n += int(model.W[l].size() + model.b[l].size());
    if (model.mode == PolicyModel::Mode::Ppo) n += int(model.value_w.size()) + 1 + 4;
    return n;
}

std::vector<double> getParams(const PolicyModel& model) {
    std::vector<double> out;
    out.reserve(paramCount(model));
    for (int l = 0; l < model.layerCount(); ++l) {
        out.insert(out.end(), model.W[l].begin(), model.W[l].end());
        out.insert(out.end(), model.b[l].begin(), model.b[l].end());
    }
    if (model.mode == PolicyModel::Mode::Ppo) {
        out.insert(out.end(), model.value_w.begin(), model.value_w.end());
        out.push_back(model.value_b);
        out.insert(out.end(), model.log_std.begin(), model.log_std.end());
    }
    return out;
}

void setParams(PolicyModel& model, const std::vector<double>& params) {
    requireArg(int(params.size()) == paramCount(model), "parameter vector size mismatch");
    std::size_t k = 0;
    for (int l = 0; l < model.layerCount(); ++l) {
        for (double& w : model.W[l]) w = params[k++];
        for (double& b : model.b[l]) b = params[k++];
    }
    if (model.mode == PolicyModel::Mode::Ppo) {
        for (double& w : model.value_w) w = params[k++];
        model.value_b = params[k++];
        for (double& s : model.log_std) s = params[k++];
    }
}

double supervisedLossGrad(const PolicyModel& model,
                          const std::vector<SupervisedSample>& batch,
                          std::vector<double>& grad) {
    requireArg(!batch.empty(), "loss needs a non-empty batch");
    const auto& half = PolicyModel::actionHalfRange();
    GradBuffers g;
    g.init(model);
    double loss = 0.0;
    const double scale = 1.0 / (double(batch.size()) * 4.0);
    Trace t;
    for (const SupervisedSample& s : batch) {
        runForward(model, s.obs.data(), t);
        std::vector<double> d_out(4, 0.0);
        for (int i = 0; i < 4; ++i) {
            double th = std::tanh(t.post.back()[i]);
            double a = half[i] * th;
            double e = a - s.action[i];
            loss += e * e * scale;
            d_out[i] = 2.0 * e * scale * half[i] * (1.0 - th * th);
        }
        backprop(model, t, d_out, 0.0, g);
    }
    flatten(model, g, grad);
    return loss;
}

double logProbPre(const PolicyModel& model, const std::array<double, 4>& mean_pre,
                  const std::array<double, 4>& u) {
    double lp = 0.0;
    for (int i = 0; i < 4; ++i) {
        double sd = std::exp(model.log_std[i]);
        double z = (u[i] - mean_pre[i]) / sd;
        lp += -0.5 * z * z - model.log_std[i] - kHalfLog2Pi;
    }
    return lp;
}

PpoLossParts ppoLossGrad(const PolicyModel& model, const std::vector<PpoSample>& batch,
                         double clip_eps, double value_coeff, std::vector<double>& grad) {
    requireArg(!batch.empty(), "loss needs a non-empty batch");
    requireState(model.mode == PolicyModel::Mode::Ppo, "ppo loss needs a ppo model");
    GradBuffers g;
    g.init(model);
    PpoLossParts parts;
    const double inv_n = 1.0 / double(batch.size());
    Trace t;
    for (const PpoSample& s : batch) {
        runForward(model, s.obs.data(), t);
        std::array<double, 4> mean_pre{};
        for (int i = 0; i < 4; ++i) mean_pre[i] = t.post.back()[i];

        double lp = logProbPre(model, mean_pre, s.u);
        double ratio = std::exp(lp - s.logp_old);
        double lo = 1.0 - clip_eps, hi = 1.0 + clip_eps;
        double unclipped = ratio * s.advantage;
        double clipped = std::clamp(ratio, lo, hi) * s.advantage;
        double surr = std::min(unclipped, clipped);
        parts.surrogate += -surr * inv_n;

        // gradient flows through the ratio only when the unclipped branch is
        // the active minimum
        double d_ratio = 0.0;
        if (unclipped <= clipped) d_ratio = -s.advantage * inv_n;

        std::vector<double> d_out(4, 0.0);
        if (d_ratio != 0.0) {
            for (int i = 0; i < 4; ++i) {
                double sd = std::exp(model.log_std[i]);
                double z = (s.u[i] - mean_pre[i]) / sd;
                // d lp / d mean = z / sd ; d lp / d log_std = z^2 - 1
                d_out[i] = d_ratio * ratio * (z / sd);
                g.d_log_std[i] += d_ratio * ratio * (z * z - 1.0);
            }
        }

        double verr = t.value - s.reward_norm;
        parts.value += value_coeff * verr * verr * inv_n;
        double d_value = value_coeff * 2.0 * verr * inv_n;

        backprop(model, t, d_out, d_value, g);
    }
    parts.total = parts.surrogate + parts.value;
    flatten(model, g, grad);
    return parts;
}

namespace {

template <typename LossFn>
double gradCheck(PolicyModel model, LossFn loss_fn) {
    std::vector<double> grad;
    loss_fn(model, grad);
    std::vector<double> params = getParams(model);
    const double h = 1e-5;
    double worst = 0.0;
    std::vector<double> scratch;
    for (std::size_t i = 0; i < params.size(); ++i) {
        double saved = params[i];
        params[i] = saved + h;
        setParams(model, params);
        double lp = loss_fn(model, scratch);
        params[i] = saved - h;
        setParams(model, params);
        double lm = loss_fn(model, scratch);
        params[i] = saved;
        double numeric = (lp - lm) / (2.0 * h);
        double denom = std::max({std::abs(grad[i]), std::abs(numeric), 1e-3});
        worst = std::max(worst, std::abs(grad[i] - numeric) / denom);
    }
    setParams(model, params);
    return worst;
}

}  // namespace

double gradCheckSupervised(const PolicyModel& model,
                           const std::vector<SupervisedSample>& batch) {
    return gradCheck(model, [&](const PolicyModel& m, std::vector<double>& g) {
        return supervisedLossGrad(m, batch, g);
    });
}

double gradCheckPpo(const PolicyModel& model, const std::vector<PpoSample>& batch,
                    double clip_eps, double value_coeff) {
    return gradCheck(model, [&](const PolicyModel& m, std::vector<double>& g) {
        return ppoLossGrad(m, batch, clip_eps, value_coeff, g).total;
    });
}

namespace {

std::string hexf(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

void writeVec(std::ofstream& out, const char* tag, const std::vector<double>& v) {
    out << tag;
    for (double x : v) out << ' ' << hexf(x);
    out << '\n';
}

std::vector<double> readVec(std::istringstream& ss, std::size_t expect) {
    std::vector<double> v;
    std::string tok;
    while (ss >> tok) v.push_back(std::strtod(tok.c_str(), nullptr));
    require(v.size() == expect, ErrorCode::Io, "model file: vector length mismatch");
    return v;
}

}  // namespace

void saveModel(const PolicyModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::Io, "cannot open model file for writing: " + path);
    out << "bedsim-model 1\n";
    out << "mode " << (model.mode == PolicyModel::Mode::Ppo ? "ppo" : "supervised")
        << '\n';
    out << "hidden " << (model.hidden_act == Activation::ReLU ? "relu" : "tanh") << '\n';
    out << "sizes";
    for (int s : model.sizes) out << ' ' << s;
    out << '\n';
    const auto& half = PolicyModel::actionHalfRange();
    out << "bounds";
    for (double h : half) out << ' ' << hexf(h);
    out << '\n';
    for (int l = 0; l < model.layerCount(); ++l) {
        writeVec(out, "W", model.W[l]);
        writeVec(out, "b", model.b[l]);
    }
    if (model.mode == PolicyModel::Mode::Ppo) {
        writeVec(out, "value_w", model.value_w);
        out << "value_b " << hexf(model.value_b) << '\n';
        out << "log_std";
        for (double s : model.log_std) out << ' ' << hexf(s);
        out << '\n';
    }
    require(out.good(), ErrorCode::Io, "write failed: " + path);
}

PolicyModel loadModel(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::Io, "cannot open model file: " + path);
    std::string line, tag;

    auto nextLine = [&](const std::string& want) -> std::istringstream {
        require(bool(std::getline(in, line)), ErrorCode::Io,
                "model file truncated before " + want);
        std::istringstream ss(line);
        ss >> tag;
        require(tag == want, ErrorCode::Io, "model file: expected " + want + ", got " + tag);
        return ss;
    };

    {
        auto ss = nextLine("bedsim-model");
        int version = 0;
        ss >> version;
        require(version == 1, ErrorCode::Io, "unsupported model file version");
    }
    PolicyModel m;
    {
        auto ss = nextLine("mode");
        std::string mode;
        ss >> mode;
        require(mode == "ppo" || mode == "supervised", ErrorCode::Io,
                "model file: bad mode");
        m.mode = mode == "ppo" ? PolicyModel::Mode::Ppo : PolicyModel::Mode::Supervised;
    }
    {
        auto ss = nextLine("hidden");
        std::string act;
        ss >> act;
        require(act == "relu" || act == "tanh", ErrorCode::Io, "model file: bad activation");
        m.hidden_act = act == "relu" ? Activation::ReLU : Activation::Tanh;
    }
    {
        auto ss = nextLine("sizes");
        int s;
        while (ss >> s) m.sizes.push_back(s);
        require(m.sizes.size() >= 2 && m.sizes.front() == 12 && m.sizes.back() == 4,
                ErrorCode::Io, "model file: bad layer sizes");
    }
    {
        auto ss = nextLine("bounds");
        std::vector<double> b = readVec(ss, 4);
        const auto& half = PolicyModel::actionHalfRange();
        for (int i = 0; i < 4; ++i)
            require(b[i] == half[i], ErrorCode::Io, "model file: action bounds mismatch");
    }
    int layers = m.layerCount();
    m.W.resize(layers);
    m.b.resize(layers);
    for (int l = 0; l < layers; ++l) {
        auto sw = nextLine("W");
        m.W[l] = readVec(sw, std::size_t(m.sizes[l]) * m.sizes[l + 1]);
        auto sb = nextLine("b");
        m.b[l] = readVec(sb, std::size_t(m.sizes[l + 1]));
    }
    if (m.mode == PolicyModel::Mode::Ppo) {
        auto sv = nextLine("value_w");
        m.value_w = readVec(sv, std::size_t(m.sizes[layers - 1]));
        {
            auto ss = nextLine("value_b");
            std::string tok;
            require(bool(ss >> tok), ErrorCode::Io, "model file: missing value_b");
            m.value_b = std::strtod(tok.c_str(), nullptr);
        }
        auto ss = nextLine("log_std");
        std::vector<double> v = readVec(ss, 4);
        for (int i = 0; i < 4; ++i) m.log_std[i] = v[i];
    }
    return m;
}

}  // namespace bedsim
