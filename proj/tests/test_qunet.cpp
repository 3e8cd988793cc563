#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "drain/adam.hpp"
#include "drain/checkpoint.hpp"
#include "drain/errors.hpp"
#include "drain/normalizer.hpp"
#include "drain/pinball.hpp"
#include "drain/synth.hpp"
#include "drain/trainer.hpp"
#include "drain/unet.hpp"
#include "support/fixtures.hpp"
#include "support/gradcheck.hpp"

using namespace drain;
using namespace drain::qunet;

namespace {

double loss1(double y, double yhat, double q)
{
    const std::vector<double> p{yhat};
    const std::vector<float> t{static_cast<float>(y)};
    const std::vector<double> l{q};
    return pinball_loss<double>(p, t, l);
}

ModelConfig small_model(std::uint64_t seed = 3)
{
    ModelConfig cfg;
    cfg.depth = 2;
    cfg.base_width = 4;
    cfg.init_seed = seed;
    return cfg;
}

std::vector<Sample> random_samples(std::size_t n, std::size_t side, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> n01(0.0f, 1.0f);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    std::vector<Sample> out;
    for (std::size_t s = 0; s < n; ++s) {
        Sample x;
        x.input.n_scan = side;
        x.input.n_pix = side;
        x.input.planes.resize(4 * side * side);
        for (auto& v : x.input.planes) {
            v = n01(rng);
        }
        x.target.resize(side * side);
        for (std::size_t i = 0; i < x.target.size(); ++i) {
            // Rain grows where channel 2 is cold, so there is something to learn.
            const float cold = -x.input.planes[2 * side * side + i];
            x.target[i] = cold > 0.3f ? 3.0f * cold * (0.5f + u(rng)) : 0.0f;
        }
        out.push_back(std::move(x));
    }
    return out;
}

bool same_bits(std::span<const float> a, std::span<const float> b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

TEST_SUITE("pinball")
{
    TEST_CASE("closed-form cases")
    {
        CHECK(std::abs(loss1(2, 1, 0.5) - 0.5) < 1e-12);
        CHECK(std::abs(loss1(0, 1, 0.9) - 0.1) < 1e-12);
        for (double q : {0.01, 0.3, 0.99}) {
            CHECK(loss1(1.5, 1.5, q) == 0.0);
        }
        const std::vector<double> pred{1.0, 1.0};
        const std::vector<float> tgt{0.0f, 2.0f};
        const std::vector<double> lv{0.5};
        CHECK(std::abs(pinball_loss<double>(pred, tgt, lv) - 0.5) < 1e-12);
    }

    TEST_CASE("levels are j/100")
    {
        const auto l = quantile_levels();
        REQUIRE(l.size() == 99);
        CHECK(l.front() == doctest::Approx(0.01));
        CHECK(l[49] == doctest::Approx(0.5));
        CHECK(l.back() == doctest::Approx(0.99));
    }

    TEST_CASE("sum over levels of per-level means; NaN targets leave N")
    {
        const std::vector<double> lv{0.25, 0.75};
        const std::vector<float> tgt{1.0f, NAN, 3.0f};
        const std::vector<double> pred{2.0, 9.0, 2.0, 0.0, 9.0, 0.0};
        // level 0.25: pixel 0 u=-1 -> 0.75, pixel 2 u=1 -> 0.25, mean 0.5
        // level 0.75: pixel 0 u=1 -> 0.75, pixel 2 u=3 -> 2.25, mean 1.5
        CHECK(pinball_loss<double>(pred, tgt, lv) == doctest::Approx(2.0));
        CHECK(valid_target_count(tgt) == 2);
        const std::vector<float> none{NAN, NAN, NAN};
        CHECK_THROWS_AS(pinball_loss<double>(pred, none, lv), DataError);
        CHECK_THROWS_AS(pinball_loss<double>(std::span<const double>(pred).first(5), tgt, lv), UsageError);
    }

    TEST_CASE("gradient branches")
    {
        auto g1 = [](double y, double yhat, double q) {
            const std::vector<double> p{yhat};
            const std::vector<float> t{static_cast<float>(y)};
            const std::vector<double> l{q};
            return pinball_grad<double>(p, t, l)[0];
        };
        CHECK(g1(2, 1, 0.5) == doctest::Approx(-0.5));
        CHECK(g1(0, 1, 0.9) == doctest::Approx(0.1));
        CHECK(g1(1, 1, 0.3) == doctest::Approx(-0.3));
        const std::vector<double> p{1.0, 1.0};
        const std::vector<float> t{NAN, 0.0f};
        const std::vector<double> l{0.4};
        const auto g = pinball_grad<double>(p, t, l);
        CHECK(g[0] == 0.0);
        CHECK(g[1] == doctest::Approx(0.6));
    }

    TEST_CASE("gradient matches central differences away from kinks")
    {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> u(-3, 3);
        const auto lv = quantile_levels(9);
        const std::size_t n = 20;
        std::vector<float> tgt(n);
        std::vector<double> pred(lv.size() * n);
        for (auto& t : tgt) {
            t = static_cast<float>(std::abs(u(rng)));
        }
        for (std::size_t k = 0; k < pred.size(); ++k) {
            do {
                pred[k] = u(rng);
            } while (std::abs(pred[k] - tgt[k % n]) <= 1e-3);
        }
        const auto g = pinball_grad<double>(pred, tgt, lv);
        const double h = 1e-5;
        for (std::size_t k = 0; k < pred.size(); ++k) {
            auto up = pred, down = pred;
            up[k] += h;
            down[k] -= h;
            const double fd = (pinball_loss<double>(up, tgt, lv) - pinball_loss<double>(down, tgt, lv)) / (2 * h);
            CHECK(std::abs(fd - g[k]) <= 1e-6 * std::abs(g[k]));
        }
    }

    TEST_CASE("accumulate agrees with loss and grad")
    {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<float> u(0, 5);
        const auto lv = quantile_levels(5);
        std::vector<float> tgt(30), pred(5 * 30);
        for (auto& t : tgt) t = u(rng);
        for (auto& p : pred) p = u(rng);
        tgt[3] = NAN;
        std::vector<float> grad(pred.size());
        const double inv_n = 1.0 / static_cast<double>(valid_target_count(tgt));
        const double sum = pinball_accumulate<float>(pred, tgt, lv, inv_n, grad);
        CHECK(sum * inv_n == doctest::Approx(pinball_loss<float>(pred, tgt, lv)).epsilon(1e-6));
        const auto g = pinball_grad<float>(pred, tgt, lv);
        for (std::size_t k = 0; k < g.size(); ++k) {
            CHECK(grad[k] == doctest::Approx(g[k]).epsilon(1e-6));
        }
    }

    TEST_CASE("constant minimiser is the empirical quantile")
    {
        std::mt19937_64 rng(77);
        std::lognormal_distribution<double> rain(0.0, 1.0);
        std::vector<double> ys(100);
        for (auto& y : ys) y = std::min(rain(rng), 9.9);
        std::vector<double> sorted = ys;
        std::sort(sorted.begin(), sorted.end());
        const std::vector<float> tgt(ys.begin(), ys.end());
        for (double q : {0.05, 0.25, 0.5, 0.75, 0.95}) {
            const double c = test::grid_search_quantile(ys, q, 0.0, 10.0, 1e-3);
            const auto lo = sorted[static_cast<std::size_t>(std::ceil(q * 100 - 1e-9)) - 1];
            const auto hi = sorted[static_cast<std::size_t>(std::floor(q * 100 + 1e-9))];
            CHECK(c >= lo - 1e-3);
            CHECK(c <= hi + 1e-3);
            // The library loss agrees with the oracle about which constant is best.
            const std::vector<double> lv{q};
            const std::vector<double> at_c(100, c), off(100, c + 0.05);
            CHECK(pinball_loss<double>(at_c, tgt, lv) <= pinball_loss<double>(off, tgt, lv));
        }
    }
}

TEST_SUITE("adam")
{
    TEST_CASE("first step moves by about the learning rate")
    {
        AdamConfig cfg;
        cfg.learning_rate = 1e-3;
        std::vector<double> x{1.0, -2.0, 0.5};
        const std::vector<double> g{0.3, -5.0, 1e-3};
        AdamState<double> st(3);
        const auto before = x;
        adam_step<double>(x, g, st, cfg);
        CHECK(st.step == 1);
        for (std::size_t i = 0; i < 3; ++i) {
            const double want = cfg.learning_rate * std::abs(g[i]) / (std::abs(g[i]) + cfg.epsilon);
            CHECK(std::abs(x[i] - before[i]) == doctest::Approx(want).epsilon(1e-9));
            CHECK((x[i] - before[i]) * g[i] < 0);
        }
    }

    TEST_CASE("zero gradient leaves parameters unchanged")
    {
        std::vector<float> x{1.0f, 2.0f};
        const std::vector<float> g{0.0f, 0.0f};
        AdamState<float> st(2);
        for (int i = 0; i < 5; ++i) {
            adam_step<float>(x, g, st, AdamConfig{});
        }
        CHECK(x[0] == 1.0f);
        CHECK(x[1] == 2.0f);
    }

    TEST_CASE("x squared from x = 1 matches a scalar simulation")
    {
        AdamConfig cfg;
        cfg.learning_rate = 0.1;
        std::vector<double> x{1.0};
        AdamState<double> st(1);
        double sx = 1.0, m = 0.0, v = 0.0;
        double prev = 1.0;
        bool crossed = false;
        for (int t = 1; t <= 100; ++t) {
            const std::vector<double> g{2.0 * x[0]};
            adam_step<double>(x, g, st, cfg);

            const double sg = 2.0 * sx;
            m = 0.9 * m + 0.1 * sg;
            v = 0.999 * v + 0.001 * sg * sg;
            const double mh = m / (1.0 - std::pow(0.9, t));
            const double vh = v / (1.0 - std::pow(0.999, t));
            sx -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
            CHECK(x[0] == doctest::Approx(sx).epsilon(1e-12));

            if (!crossed) {
                CHECK(std::abs(x[0]) < prev);
                crossed = std::abs(x[0]) < 0.1;
            }
            prev = std::abs(x[0]);
        }
        CHECK(crossed);
        CHECK(std::abs(x[0]) < 0.1);
    }

    TEST_CASE("size mismatch")
    {
        std::vector<float> x(3);
        const std::vector<float> g(2);
        AdamState<float> st(3);
        CHECK_THROWS_AS(adam_step<float>(x, g, st, AdamConfig{}), UsageError);
    }
}

TEST_SUITE("unet")
{
    TEST_CASE("default architecture")
    {
        const ModelConfig cfg;
        const UNet<float> net(cfg);
        CHECK(net.parameter_count() == 541171);
        CHECK(cfg.tile_multiple() == 16);
        const auto& layers = net.layers();
        CHECK(layers.front().name == "enc0.conv1");
        CHECK(layers.back().name == "head");
        CHECK(layers.back().kernel == 1);
        CHECK_FALSE(layers.back().activated);
        std::size_t total = 0;
        for (const auto& l : layers) {
            CHECK(l.weight_offset == total);
            total += l.parameter_count();
        }
        CHECK(total == net.parameter_count());
    }

    TEST_CASE("shape contract and purity")
    {
        const UNet<float> net(ModelConfig{});
        Tensor<float> x(4, 1, 64, 64);
        std::mt19937_64 rng(1);
        std::normal_distribution<float> n01;
        for (auto& v : x.data) v = n01(rng);
        const auto a = net.forward(x);
        CHECK(a.c == 99);
        CHECK(a.h == 64);
        CHECK(a.w == 64);
        const auto b = net.forward(x);
        CHECK(same_bits(a.data, b.data));
    }

    TEST_CASE("batching does not change per-sample outputs")
    {
        const UNet<float> net(small_model());
        std::mt19937_64 rng(2);
        std::normal_distribution<float> n01;
        Tensor<float> one(4, 1, 16, 16), two(4, 2, 16, 16);
        for (auto& v : two.data) v = n01(rng);
        for (std::size_t c = 0; c < 4; ++c) {
            std::copy_n(two.data.begin() + static_cast<std::ptrdiff_t>(c * 512 + 256), 256,
                        one.data.begin() + static_cast<std::ptrdiff_t>(c * 256));
        }
        const auto a = net.forward(one);
        const auto b = net.forward(two);
        for (std::size_t c = 0; c < a.c; ++c) {
            for (std::size_t i = 0; i < 256; ++i) {
                CHECK(a.data[c * 256 + i] == doctest::Approx(b.data[c * 512 + 256 + i]).epsilon(1e-5));
            }
        }
    }

    TEST_CASE("bad inputs")
    {
        const UNet<float> net(small_model());
        CHECK_THROWS_AS(net.forward(Tensor<float>(4, 1, 14, 16)), TileError);
        CHECK_THROWS_AS(net.forward(Tensor<float>(3, 1, 16, 16)), UsageError);
        ModelConfig bad;
        bad.depth = 0;
        CHECK_THROWS_AS(bad.validate(), UsageError);
        CHECK_THROWS_AS(UNet<float>(small_model(), std::vector<float>(10)), DataError);
    }

    TEST_CASE("Glorot init is seeded")
    {
        const UNet<float> a(small_model(5)), b(small_model(5)), c(small_model(6));
        CHECK(same_bits(a.params(), b.params()));
        CHECK_FALSE(same_bits(a.params(), c.params()));
        const auto& l = a.layers()[1];
        const double limit = std::sqrt(6.0 / static_cast<double>((l.c_in + l.c_out) * 9));
        for (std::size_t k = 0; k < l.weight_count(); ++k) {
            CHECK(std::abs(a.params()[l.weight_offset + k]) <= limit);
        }
        for (std::size_t k = 0; k < l.c_out; ++k) {
            CHECK(a.params()[l.bias_offset + k] == 0.0f);
        }
    }

    TEST_CASE("end-to-end gradient matches finite differences")
    {
        for (auto act : {Activation::Relu, Activation::LeakyRelu}) {
            for (auto pad : {Padding::Zero, Padding::Periodic}) {
                const auto rep = test::unet_gradient_check(21, 60, 1e-3, act, pad);
                INFO("activation " << to_string(act) << " padding " << to_string(pad) << " worst " << rep.worst_rel);
                CHECK(rep.checked == 60);
                CHECK(rep.failures == 0);
            }
        }
    }

    TEST_CASE("backward accumulates into the gradient buffer")
    {
        auto p = test::tiny_problem(9);
        const auto g = test::analytic_gradient(p);
        typename UNet<double>::Tape tape;
        const auto& out = p.model.forward(p.input, tape);
        Tensor<double> go(out.c, out.b, out.h, out.w);
        go.data = pinball_grad<double>(out.data, p.target, p.levels);
        std::vector<double> acc(p.model.parameter_count(), 0.0);
        p.model.backward(tape, go, acc);
        p.model.backward(tape, go, acc);
        for (std::size_t k = 0; k < acc.size(); k += 37) {
            CHECK(acc[k] == doctest::Approx(2 * g[k]));
        }
    }

    TEST_CASE("periodic padding makes the network translation-equivariant")
    {
        ModelConfig cfg = small_model(8);
        cfg.padding = Padding::Periodic;
        const UNet<double> net(cfg);
        const std::size_t side = 32, shift = cfg.tile_multiple();
        Tensor<double> x(4, 1, side, side), shifted(4, 1, side, side);
        std::mt19937_64 rng(3);
        std::normal_distribution<double> n01;
        for (auto& v : x.data) v = n01(rng);
        for (std::size_t c = 0; c < 4; ++c) {
            for (std::size_t i = 0; i < side; ++i) {
                for (std::size_t j = 0; j < side; ++j) {
                    shifted.data[(c * side + (i + shift) % side) * side + (j + 2 * shift) % side] =
                        x.data[(c * side + i) * side + j];
                }
            }
        }
        const auto a = net.forward(x);
        const auto b = net.forward(shifted);
        double worst = 0.0;
        for (std::size_t c = 0; c < a.c; ++c) {
            for (std::size_t i = 0; i < side; ++i) {
                for (std::size_t j = 0; j < side; ++j) {
                    const double va = a.data[(c * side + i) * side + j];
                    const double vb = b.data[(c * side + (i + shift) % side) * side + (j + 2 * shift) % side];
                    worst = std::max(worst, std::abs(va - vb));
                }
            }
        }
        CHECK(worst < 1e-10);
    }
}

TEST_SUITE("trainer")
{
    TEST_CASE("zero epochs returns the initial weights")
    {
        const auto data = random_samples(2, 16, 1);
        TrainConfig tc;
        tc.epochs = 0;
        auto st = train(initial_state(small_model()), tc, data, {});
        CHECK(st.history.empty());
        CHECK(same_bits(st.model.params(), UNet<float>(small_model()).params()));
    }

    TEST_CASE("two runs with the same seeds agree bit for bit")
    {
        const auto data = random_samples(6, 16, 2);
        const auto val = random_samples(2, 16, 3);
        TrainConfig tc;
        tc.epochs = 3;
        tc.batch_size = 4;
        tc.adam.learning_rate = 1e-3;
        const auto a = train(initial_state(small_model()), tc, data, val);
        const auto b = train(initial_state(small_model()), tc, data, val);
        REQUIRE(a.history.size() == 3);
        for (std::size_t e = 0; e < 3; ++e) {
            CHECK(a.history[e].epoch == e + 1);
            CHECK(a.history[e].train_loss == b.history[e].train_loss);
            CHECK(a.history[e].val_loss == b.history[e].val_loss);
        }
        CHECK(same_bits(a.model.params(), b.model.params()));
        CHECK(a.history.back().val_loss < a.history.front().val_loss);
    }

    TEST_CASE("resuming reproduces the uninterrupted run")
    {
        const auto data = random_samples(5, 16, 4);
        TrainConfig tc;
        tc.epochs = 4;
        tc.batch_size = 2;
        tc.adam.learning_rate = 1e-3;
        const auto full = train(initial_state(small_model()), tc, data, {});
        CHECK(std::isnan(full.history[0].val_loss));

        TrainConfig half = tc;
        half.epochs = 2;
        auto st = train(initial_state(small_model()), half, data, {});
        Checkpoint ck{small_model(), half, {}, st.history, {st.model.params().begin(), st.model.params().end()}, st.adam};
        const auto back = restore_state(decode_checkpoint(encode_checkpoint(ck)));
        const auto resumed = train(back, tc, data, {});
        REQUIRE(resumed.history.size() == 4);
        for (std::size_t e = 0; e < 4; ++e) {
            CHECK(resumed.history[e].train_loss == full.history[e].train_loss);
        }
        CHECK(same_bits(resumed.model.params(), full.model.params()));
    }

    TEST_CASE("overfits a single 16x16 scene")
    {
        dataset::SynthConfig sc;
        sc.n_scan = 16;
        sc.n_pix = 16;
        sc.cell_rate = 3;
        const auto mask = dataset::synth_surface_mask(1.0, sc.seed);
        std::uint64_t idx = 0;
        auto scene = dataset::synth_scene(sc, mask, idx);
        while (std::count_if(scene.reference.values().begin(), scene.reference.values().end(),
                             [](float v) { return v > 0.5f; }) < 40) {
            scene = dataset::synth_scene(sc, mask, ++idx);
        }
        // The tile's own statistics, so the normalizer fit needs a second copy.
        const std::vector<TbScene> fit{scene.tb, scene.tb};
        const auto norm = dataset::fit_normalizer(fit);
        const auto vals = scene.reference.values();
        const std::vector<Sample> data{{norm.apply(scene.tb), {vals.begin(), vals.end()}}};
        TrainConfig tc;
        tc.epochs = 500;
        tc.adam.learning_rate = 1e-3;
        const auto st = train(initial_state(ModelConfig{}), tc, data, {});
        INFO("epoch-1 loss " << st.history.front().train_loss << " final " << st.history.back().train_loss);
        CHECK(st.history.back().train_loss < 0.05 * st.history.front().train_loss);
    }

    TEST_CASE("divergence raises a numerical error")
    {
        auto data = random_samples(2, 16, 5);
        data[0].target[0] = 1e38f;
        TrainConfig tc;
        tc.epochs = 3;
        tc.adam.learning_rate = 1e37;
        CHECK_THROWS_AS(train(initial_state(small_model()), tc, data, {}), NumericalError);
    }

    TEST_CASE("configuration and data errors")
    {
        TrainConfig tc;
        tc.adam.learning_rate = 0;
        CHECK_THROWS_AS(tc.validate(), UsageError);
        tc = TrainConfig{};
        tc.batch_size = 0;
        CHECK_THROWS_AS(tc.validate(), UsageError);
        TrainConfig ok;
        ok.epochs = 1;
        CHECK_THROWS_AS(train(initial_state(small_model()), ok, {}, {}), DataError);
    }

    TEST_CASE("predict returns a quantile field on the tile grid")
    {
        const auto s = random_samples(1, 16, 6);
        const UNet<float> net(small_model());
        const auto geo = test::make_geo(16, 16);
        const auto qf = predict(net, s[0].input, geo);
        CHECK(qf.n_levels() == 99);
        CHECK(qf.n_pixels() == 256);
        CHECK_THROWS_AS(predict(net, s[0].input, test::make_geo(16, 32)), DataError);
    }
}

TEST_SUITE("checkpoint")
{
    TEST_CASE("round trip through a file")
    {
        test::ScratchDir dir("qnt");
        Checkpoint ck;
        ck.model = small_model(4);
        ck.model.activation = Activation::LeakyRelu;
        ck.model.padding = Padding::Periodic;
        ck.train.epochs = 9;
        ck.train.adam.learning_rate = 3e-4;
        ck.normalizer.mean = {250, 240, 260, 255};
        ck.normalizer.stddev = {10, 11, 12, 13};
        ck.history = {{1, 3.5, NAN}, {2, 2.5, 2.75}};
        const UNet<float> net(ck.model);
        ck.params.assign(net.params().begin(), net.params().end());
        write_checkpoint(dir / "m.qnt", ck);
        const auto back = read_checkpoint(dir / "m.qnt");
        CHECK(back.model.depth == 2);
        CHECK(back.model.activation == Activation::LeakyRelu);
        CHECK(back.model.padding == Padding::Periodic);
        CHECK(back.train.epochs == 9);
        CHECK(back.train.adam.learning_rate == 3e-4);
        CHECK(back.normalizer.stddev[3] == 13);
        REQUIRE(back.history.size() == 2);
        CHECK(std::isnan(back.history[0].val_loss));
        CHECK(back.history[1].val_loss == 2.75);
        CHECK(same_bits(back.params, ck.params));
        CHECK_FALSE(back.adam.has_value());
        CHECK(restore_state(back).adam.step == 0);
    }

    TEST_CASE("corrupt checkpoints")
    {
        Checkpoint ck;
        ck.model = small_model();
        const UNet<float> net(ck.model);
        ck.params.assign(net.params().begin(), net.params().end());
        auto bytes = encode_checkpoint(ck);
        auto bad = bytes;
        bad[0] = 'X';
        CHECK_THROWS_AS(decode_checkpoint(bad), FormatError);
        auto cut = bytes;
        cut.resize(cut.size() - 4);
        CHECK_THROWS_AS(decode_checkpoint(cut), FormatError);
        ck.params.pop_back();
        CHECK_THROWS_AS(encode_checkpoint(ck), UsageError);
    }
}
