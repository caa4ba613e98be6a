/*
 * Copyright 2026 The SSXGB Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ssxgb/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <memory>

#include "ssxgb/bcp.h"
#include "ssxgb/bus.h"
#include "ssxgb/protocols.h"
#include "ssxgb/random.h"
#include "ssxgb/runner.h"

namespace ssxgb {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

// One rep should last at least this long so cheap ops are measurable.
constexpr double kMinRepMs = 2.0;
constexpr int kMaxInner = 5000;

BenchRow time_op(unsigned key_bits, const std::string& name, int reps,
                 const std::function<void()>& op) {
  auto start = Clock::now();
  op();  // warm-up and calibration
  const double once = std::max(elapsed_ms(start), 1e-6);
  const int inner = std::clamp(static_cast<int>(std::ceil(kMinRepMs / once)),
                               1, kMaxInner);
  std::vector<double> samples;
  for (int r = 0; r < reps; ++r) {
    start = Clock::now();
    for (int i = 0; i < inner; ++i) op();
    samples.push_back(elapsed_ms(start) / inner);
  }
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= samples.size();
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  const double sd = samples.size() > 1 ? std::sqrt(var / (samples.size() - 1))
                                       : 0.0;
  return {key_bits, name, mean, sd, reps, inner};
}

}  // namespace

const std::vector<std::string>& bench_ops() {
  static const std::vector<std::string> ops = {
      "Enc", "Dec",  "mDec",     "KeyProd", "Add", "Sub",
      "Neg", "Exp",  "Mult",     "TransDec", "LGT", "Div"};
  return ops;
}

std::vector<BenchRow> bench_primitives(const std::vector<unsigned>& key_bits,
                                       int reps, uint64_t seed,
                                       const std::string& cache_dir) {
  std::vector<BenchRow> rows;
  for (unsigned bits : key_bits) {
    const auto [pp, mk] = generate_keys(bits, seed, cache_dir);
    const FixedPointConfig fp;
    auto table = make_generator_table(pp);
    RandomSource rng(seed, "bench/" + std::to_string(bits));
    MessageBus bus(pp.ciphertext_bytes());
    ServerS s(pp, mk, fp, table, &bus, RandomSource(seed, "bench-s"));
    ServerC c(pp, fp, table, &bus, RandomSource(seed, "bench-c"));
    bus.attach(kServerS, &s);
    bus.attach(kServerC, &c);

    const KeyPair u1 = keygen(pp, rng);
    const KeyPair u2 = keygen(pp, rng);
    const BigInt joint = key_prod(pp, {u1.pk, u2.pk});
    s.register_key("u1", u1.pk);
    s.register_key("u2", u2.pk);
    s.register_key(kJointKeyId, joint);
    c.register_key("u1", u1.pk);
    c.register_key("u2", u2.pk);
    c.register_key(kJointKeyId, joint);

    const Encryptor enc_u1(pp, u1.pk, "u1", table);
    MasterDecryptor master(pp, mk, table);
    const BigInt m1 = rng.bits(48);
    const BigInt m2 = rng.bits(48);
    const Ciphertext c1 = enc_u1.encrypt(m1, rng);
    const Ciphertext c2 = enc_u1.encrypt(m2, rng);
    const BigInt k = rng.bits(64);
    const ScaledCiphertext x = c.encrypt(1.75, fp.scale_exp);
    const ScaledCiphertext y = c.encrypt(-0.625, fp.scale_exp);
    const ScaledCiphertext den = c.encrypt(2.5, fp.scale_exp);

    // Sink so the optimizer keeps every result.
    BigInt sink = 0;
    const std::vector<std::pair<std::string, std::function<void()>>> ops = {
        {"Enc", [&] { sink += enc_u1.encrypt(m1, rng).a; }},
        {"Dec", [&] { sink += dec(pp, u1.sk, c1); }},
        {"mDec", [&] { sink += master.decrypt(u1.pk, c1); }},
        {"KeyProd", [&] { sink += key_prod(pp, {u1.pk, u2.pk}); }},
        {"Add", [&] { sink += add(pp, c1, c2).a; }},
        {"Sub", [&] { sink += add(pp, c1, neg(pp, c2)).a; }},
        {"Neg", [&] { sink += neg(pp, c1).a; }},
        {"Exp", [&] { sink += exp(pp, c1, k).a; }},
        {"Mult", [&] { sink += c.mult(x, y).ct.a; }},
        {"TransDec", [&] { sink += c.trans_dec(x.ct, "u1").a; }},
        {"LGT", [&] { sink += c.lgt(x, y) ? 1 : 0; }},
        {"Div", [&] { sink += c.div(x, den).ct.a; }},
    };
    for (const auto& [name, op] : ops) {
      rows.push_back(time_op(bits, name, reps, op));
    }
    if (sink == -1) rows.clear();
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "key_bits,op,mean_ms,stddev_ms,reps,inner\n" << std::setprecision(6);
  for (const BenchRow& r : rows) {
    out << r.key_bits << ',' << r.op << ',' << r.mean_ms << ',' << r.stddev_ms
        << ',' << r.reps << ',' << r.inner << '\n';
  }
}

}  // namespace ssxgb
