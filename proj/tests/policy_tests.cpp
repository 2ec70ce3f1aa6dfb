#include <cmath>
#include <cstdio>

#include "core/error.hpp"
#include "doctest.h"
#include "policy/mlp.hpp"
#include "policy/train.hpp"

using namespace bedsim;

namespace {

Observation randomObs(Rng& rng, double scale = 0.5) {
    Observation o;
    for (auto& v : o.values) v = rng.uniform(-scale, scale);
    return o;
}

std::vector<SupervisedSample> randomSupervisedBatch(Rng& rng, int n) {
    std::vector<SupervisedSample> batch(n);
    const auto& half = PolicyModel::actionHalfRange();
    for (auto& s : batch) {
        for (auto& v : s.obs) v = rng.uniform(-0.5, 0.5);
        for (int i = 0; i < 4; ++i) s.action[i] = half[i] * rng.uniform(-0.9, 0.9);
    }
    return batch;
}

std::vector<PpoSample> randomPpoBatch(const PolicyModel& m, Rng& rng, int n) {
    std::vector<PpoSample> batch(n);
    for (auto& s : batch) {
        for (auto& v : s.obs) v = rng.uniform(-0.5, 0.5);
        Observation o;
        o.values = s.obs;
        ForwardResult f = forward(m, o);
        for (int i = 0; i < 4; ++i) s.u[i] = f.pre[i] + 0.3 * rng.normal();
        s.logp_old = logProbPre(m, f.pre, s.u) + rng.uniform(-0.1, 0.1);
        s.advantage = rng.uniform(-1.0, 1.0);
        s.reward_norm = rng.uniform(0.0, 1.0);
    }
    return batch;
}

struct StubEnv : RolloutEnv {
    double reward_scale = 1.0;
    static constexpr std::array<double, 4> optimum = {0.10, -0.30, 0.20, 0.40};
    Observation reset(std::uint64_t seed) override {
        Rng r(seed);
        Observation o;
        for (auto& v : o.values) v = r.uniform(-0.1, 0.1);
        return o;
    }
    double rollout(const Action& a) override {
        auto v = a.asArray();
        double d2 = 0;
        for (int i = 0; i < 4; ++i) d2 += (v[i] - optimum[i]) * (v[i] - optimum[i]);
        return reward_scale * (100.0 - 100.0 * std::sqrt(d2));
    }
};

double distToOptimum(const PolicyModel& m) {
    Observation o{};
    auto a = forward(m, o).action.asArray();
    double d2 = 0;
    for (int i = 0; i < 4; ++i)
        d2 += (a[i] - StubEnv::optimum[i]) * (a[i] - StubEnv::optimum[i]);
    return std::sqrt(d2);
}

}  // namespace

TEST_CASE("forward squashes into the action box") {
    PolicyModel m = makeSupervisedModel(1);
    // all-zero parameters -> box center
    std::vector<double> zeros(paramCount(m), 0.0);
    PolicyModel z = m;
    setParams(z, zeros);
    Observation obs{};
    obs.values.fill(0.3);
    Action a = forward(z, obs).action;
    CHECK(a.gx == 0.0);
    CHECK(a.gy == 0.0);
    CHECK(a.rx == 0.0);
    CHECK(a.ry == 0.0);

    // saturating pre-activations -> the box corner
    PolicyModel sat = m;
    std::vector<double> big(paramCount(m), 0.0);
    setParams(sat, big);
    for (auto& b : sat.b.back()) b = 50.0;  // saturate the output layer
    Action corner = forward(sat, obs).action;
    CHECK(corner.gx == doctest::Approx(0.44).epsilon(1e-9));
    CHECK(corner.gy == doctest::Approx(1.05).epsilon(1e-9));
    CHECK(corner.rx == doctest::Approx(0.44).epsilon(1e-9));
    CHECK(corner.ry == doctest::Approx(1.05).epsilon(1e-9));

    // deterministic
    Rng rng(3);
    Observation o2 = randomObs(rng);
    ForwardResult f1 = forward(m, o2), f2 = forward(m, o2);
    for (int i = 0; i < 4; ++i) CHECK(f1.pre[i] == f2.pre[i]);
}

TEST_CASE("act modes: mean, sampling, and the zero-noise limit") {
    PolicyModel m = makePpoModel(2);
    Rng rng(5);
    Observation obs = randomObs(rng);

    Rng r1(9);
    Action det = act(m, obs, true, r1);
    auto mean = forward(m, obs).action.asArray();
    auto d = det.asArray();
    for (int i = 0; i < 4; ++i) CHECK(d[i] == mean[i]);

    // 10^4 stochastic draws stay inside the box
    for (int i = 0; i < 10000; ++i) CHECK(act(m, obs, false, rng).inBounds());

    PolicyModel frozen = m;
    frozen.log_std.fill(-60.0);  // effectively zero noise
    Rng r2(9);
    auto s = act(frozen, obs, false, r2).asArray();
    for (int i = 0; i < 4; ++i) CHECK(s[i] == doctest::Approx(mean[i]).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central differences") {
    Rng rng(7);
    PolicyModel sm = makeSupervisedModel(1);
    CHECK(gradCheckSupervised(sm, randomSupervisedBatch(rng, 8)) < 1e-4);

    PolicyModel pm = makePpoModel(2);
    CHECK(gradCheckPpo(pm, randomPpoBatch(pm, rng, 8), 0.2, 0.5) < 1e-4);
}

TEST_CASE("zero-loss batch has zero gradient") {
    Rng rng(11);
    PolicyModel m = makeSupervisedModel(3);
    std::vector<SupervisedSample> batch(8);
    for (auto& s : batch) {
        Observation o = randomObs(rng);
        s.obs = o.values;
        s.action = forward(m, o).action.asArray();  // targets equal outputs
    }
    std::vector<double> grad;
    double loss = supervisedLossGrad(m, batch, grad);
    CHECK(loss < 1e-20);
    double gnorm = 0;
    for (double g : grad) gnorm += g * g;
    CHECK(std::sqrt(gnorm) < 1e-10);
}

TEST_CASE("central-difference truncation error shrinks quadratically in h") {
    Rng rng(13);
    PolicyModel m = makePpoModel(4);
    auto batch = randomPpoBatch(m, rng, 4);
    std::vector<double> grad;
    ppoLossGrad(m, batch, 0.2, 0.5, grad);

    // probe one bias of the first layer along h and 2h
    std::vector<double> params = getParams(m);
    std::size_t idx = std::size_t(12) * 50;  // first bias entry
    auto lossAt = [&](double delta) {
        std::vector<double> p = params;
        p[idx] += delta;
        PolicyModel probe = m;
        setParams(probe, p);
        std::vector<double> g;
        return ppoLossGrad(probe, batch, 0.2, 0.5, g).total;
    };
    auto numericErr = [&](double h) {
        double numeric = (lossAt(h) - lossAt(-h)) / (2.0 * h);
        return std::abs(numeric - grad[idx]);
    };
    double e1 = numericErr(1e-3), e2 = numericErr(2e-3);
    if (e1 > 1e-12) {  // quadratic order: doubling h roughly quadruples error
        CHECK(e2 / e1 > 2.0);
        CHECK(e2 / e1 < 8.0);
    }
}

TEST_CASE("ppo loss parts and the zero-advantage batch") {
    PolicyModel m = makePpoModel(6);
    Rng rng(15);
    auto batch = randomPpoBatch(m, rng, 8);
    std::vector<double> grad;
    PpoLossParts parts = ppoLossGrad(m, batch, 0.2, 0.5, grad);
    CHECK(parts.total == doctest::Approx(parts.surrogate + parts.value).epsilon(1e-12));

    for (auto& s : batch) s.advantage = 0.0;
    PpoLossParts zero = ppoLossGrad(m, batch, 0.2, 0.0, grad);
    CHECK(zero.total == 0.0);
    double gnorm = 0;
    for (double g : grad) gnorm += g * g;
    CHECK(gnorm == 0.0);  // surrogate contributes nothing when A = 0

    CHECK_THROWS_AS(ppoLossGrad(m, {}, 0.2, 0.5, grad), Error);
    PolicyModel sup = makeSupervisedModel(1);
    CHECK_THROWS_AS(ppoLossGrad(sup, batch, 0.2, 0.5, grad), Error);
}

TEST_CASE("supervised training memorizes a teacher network") {
    Rng rng(17);
    PolicyModel teacher = makeSupervisedModel(99);
    Dataset ds;
    for (int i = 0; i < 16; ++i) {
        DatasetRow row;
        Observation o = randomObs(rng);
        row.obs = o.values;
        row.act = forward(teacher, o).action.asArray();
        row.reward = 100;
        row.target = "upper_body";
        row.pose_seed = i;
        ds.rows.push_back(row);
    }
    TrainConfig cfg;
    cfg.seed = 3;
    SupervisedResult res = trainSupervised(ds, cfg);
    CHECK(res.loss_curve.size() == 100);
    CHECK(res.loss_curve.back() < 1e-3);
    CHECK(res.loss_curve.back() < res.loss_curve.front());

    SupervisedResult res2 = trainSupervised(ds, cfg);
    CHECK(getParams(res.model) == getParams(res2.model));

    CHECK_THROWS_AS(trainSupervised(Dataset{}, cfg), Error);
}

TEST_CASE("one-step ppo solves the stub environment") {
    EnvFactory f = [] { return std::make_unique<StubEnv>(); };
    PpoConfig cfg;
    cfg.total_rollouts = 3000;
    cfg.sgd_lr = 1e-3;  // desk-scale rate; the full-scale default is slower
    cfg.seed = 5;
    PpoResult res = ppoTrain(f, cfg);
    CHECK(res.reward_curve.size() == std::size_t((3000 + 31) / 32));
    CHECK(distToOptimum(res.model) < 0.05);
    CHECK(res.reward_curve.back() > res.reward_curve.front());
}

TEST_CASE("reward rescaling with a matched learning rate finds the same optimum") {
    PpoConfig cfg;
    cfg.total_rollouts = 3000;
    cfg.sgd_lr = 1e-3;
    cfg.seed = 5;
    PpoResult base = ppoTrain([] { return std::make_unique<StubEnv>(); }, cfg);

    PpoConfig scaled = cfg;
    scaled.sgd_lr = cfg.sgd_lr / 2.0;
    PpoResult twice = ppoTrain(
        [] {
            auto env = std::make_unique<StubEnv>();
            env->reward_scale = 2.0;
            return env;
        },
        scaled);
    CHECK(distToOptimum(base.model) < 0.05);
    CHECK(distToOptimum(twice.model) < 0.1);
}

TEST_CASE("model files round trip bit-exactly") {
    PolicyModel m = makePpoModel(21);
    const char* path = "policy_test_model.txt";
    saveModel(m, path);
    PolicyModel back = loadModel(path);
    CHECK(back.mode == m.mode);
    CHECK(back.sizes == m.sizes);
    CHECK(getParams(back) == getParams(m));

    PolicyModel sup = makeSupervisedModel(22);
    saveModel(sup, path);
    PolicyModel back2 = loadModel(path);
    CHECK(getParams(back2) == getParams(sup));
    std::remove(path);

    CHECK_THROWS_AS(loadModel("no_such_model.txt"), Error);

    // corrupted version line is rejected
    {
        FILE* f = std::fopen(path, "w");
        std::fputs("bedsim-model 9\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(loadModel(path), Error);
    std::remove(path);
}
