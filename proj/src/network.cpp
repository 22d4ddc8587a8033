#include "playroom/network.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace playroom {

void NetworkSpec::validate() const {
    if (n_rays <= 0 || vision_hidden <= 0 || vision_out <= 0 || audio_hidden <= 0 ||
        fusion_dim <= 0 || head_hidden <= 0)
        throw std::invalid_argument("NetworkSpec: all widths must be positive");
}

std::string NetworkSpec::serialize() const {
    std::ostringstream os;
    os << "n_rays=" << n_rays << ";mm=" << (multimodal ? 1 : 0) << ";vh=" << vision_hidden
       << ";vo=" << vision_out << ";ah=" << audio_hidden << ";F=" << fusion_dim
       << ";hh=" << head_hidden;
    return os.str();
}

uint64_t NetworkSpec::hash() const {
    std::string s = serialize();
    uint64_t h = 14695981039346656037ULL;
    for (char c : s) {
        h ^= static_cast<uint8_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

int ParamSet::index_of(const std::string& name) const {
    for (size_t i = 0; i < params.size(); ++i)
        if (params[i].name == name) return static_cast<int>(i);
    throw std::invalid_argument("ParamSet: unknown parameter " + name);
}

Tensor& ParamSet::at(const std::string& name) {
    return params[static_cast<size_t>(index_of(name))].value;
}
const Tensor& ParamSet::at(const std::string& name) const {
    return params[static_cast<size_t>(index_of(name))].value;
}

size_t ParamSet::total_size() const {
    size_t n = 0;
    for (const auto& p : params) n += p.value.size();
    return n;
}

namespace {

void add_weight(ParamSet& ps, Rng& rng, const std::string& name, Partition part, int in, int out) {
    Param p;
    p.name = name;
    p.partition = part;
    p.value = Tensor({in, out});
    double bound = std::sqrt(1.0 / in);  // D16
    for (double& v : p.value.data) v = rng.uniform(-bound, bound);
    ps.params.push_back(std::move(p));
}

void add_bias(ParamSet& ps, const std::string& name, Partition part, int out) {
    Param p;
    p.name = name;
    p.partition = part;
    p.value = Tensor({out});
    p.is_bias = true;
    ps.params.push_back(std::move(p));
}

}  // namespace

ParamSet make_params(const NetworkSpec& spec, uint64_t seed) {
    spec.validate();
    ParamSet ps;
    ps.spec = spec;
    Rng rng(seed);
    add_weight(ps, rng, "v1_w", Partition::VisionEncoder, spec.vision_in(), spec.vision_hidden);
    add_bias(ps, "v1_b", Partition::VisionEncoder, spec.vision_hidden);
    add_weight(ps, rng, "v2_w", Partition::VisionEncoder, spec.vision_hidden, spec.vision_out);
    add_bias(ps, "v2_b", Partition::VisionEncoder, spec.vision_out);
    int fuse_in = spec.vision_out;
    if (spec.multimodal) {
        add_weight(ps, rng, "a1_w", Partition::AudioEncoder, spec.audio_in(), spec.audio_hidden);
        add_bias(ps, "a1_b", Partition::AudioEncoder, spec.audio_hidden);
        fuse_in += spec.audio_hidden;
    }
    add_weight(ps, rng, "f_w", Partition::Fusion, fuse_in, spec.fusion_dim);
    add_bias(ps, "f_b", Partition::Fusion, spec.fusion_dim);
    add_weight(ps, rng, "e_w", Partition::ObjectEmbed, 10, spec.fusion_dim);
    add_bias(ps, "e_b", Partition::ObjectEmbed, spec.fusion_dim);
    add_weight(ps, rng, "p1_w", Partition::PolicyHead, spec.fusion_dim, spec.head_hidden);
    add_bias(ps, "p1_b", Partition::PolicyHead, spec.head_hidden);
    add_weight(ps, rng, "p2_w", Partition::PolicyHead, spec.head_hidden, 4);
    add_bias(ps, "p2_b", Partition::PolicyHead, 4);
    for (int h = 1; h <= 2; ++h) {
        Partition part = (h == 1) ? Partition::QHead1 : Partition::QHead2;
        std::string pre = "q" + std::to_string(h);
        add_weight(ps, rng, pre + "a_w", part, spec.fusion_dim + 2, spec.head_hidden);
        add_bias(ps, pre + "a_b", part, spec.head_hidden);
        add_weight(ps, rng, pre + "b_w", part, spec.head_hidden, 1);
        add_bias(ps, pre + "b_b", part, 1);
    }
    return ps;
}

namespace {

int tape_layer(Tape& tape, const ParamSet& p, int x, const std::string& w_name,
               const std::string& b_name) {
    int wi = p.index_of(w_name);
    int bi = p.index_of(b_name);
    int w = tape.param(wi, p.params[static_cast<size_t>(wi)].value, false);
    int b = tape.param(bi, p.params[static_cast<size_t>(bi)].value, true);
    return tape.linear(x, w, b);
}

}  // namespace

int features_forward(Tape& tape, const ParamSet& p, int obs_node) {
    const NetworkSpec& spec = p.spec;
    if (tape.value(obs_node).cols != spec.obs_dim())
        throw std::invalid_argument("features_forward: observation width mismatch");
    int vis = tape.slice_cols(obs_node, 0, spec.vision_in());
    int v = tape.relu(tape_layer(tape, p, vis, "v1_w", "v1_b"));
    v = tape.relu(tape_layer(tape, p, v, "v2_w", "v2_b"));
    int enc = v;
    int onehot_begin = spec.vision_in();
    if (spec.multimodal) {
        int aud = tape.slice_cols(obs_node, spec.vision_in(), spec.audio_in());
        int a = tape.relu(tape_layer(tape, p, aud, "a1_w", "a1_b"));
        enc = tape.concat_cols(v, a);
        onehot_begin += spec.audio_in();
    }
    int fused = tape_layer(tape, p, enc, "f_w", "f_b");  // linear interaction feature map
    int onehot = tape.slice_cols(obs_node, onehot_begin, 10);
    int embed = tape_layer(tape, p, onehot, "e_w", "e_b");
    return tape.mul(fused, embed);  // mask by the projected object embedding
}

PolicyNodes policy_forward(Tape& tape, const ParamSet& p, int obs_node) {
    PolicyNodes out;
    out.features = features_forward(tape, p, obs_node);
    int h = tape.relu(tape_layer(tape, p, out.features, "p1_w", "p1_b"));
    int raw = tape_layer(tape, p, h, "p2_w", "p2_b");
    out.mean = tape.slice_cols(raw, 0, 2);
    out.log_std = tape.clamp(tape.slice_cols(raw, 2, 2), kLogStdMin, kLogStdMax);
    return out;
}

int q_forward(Tape& tape, const ParamSet& p, int features_node, int action_node, int head) {
    if (head != 1 && head != 2) throw std::invalid_argument("q_forward: head must be 1 or 2");
    std::string pre = "q" + std::to_string(head);
    int in = tape.concat_cols(features_node, action_node);
    int h = tape.relu(tape_layer(tape, p, in, pre + "a_w", pre + "a_b"));
    return tape_layer(tape, p, h, pre + "b_w", pre + "b_b");
}

ForwardOut forward(const ParamSet& p, const Mat& obs, const Mat& action) {
    Tape tape;
    int obs_node = tape.input(obs);
    int act_node = tape.input(action);
    PolicyNodes pn = policy_forward(tape, p, obs_node);
    int q1 = q_forward(tape, p, pn.features, act_node, 1);
    int q2 = q_forward(tape, p, pn.features, act_node, 2);
    ForwardOut out;
    out.features = tape.value(pn.features);
    out.mean = tape.value(pn.mean);
    out.log_std = tape.value(pn.log_std);
    out.q1 = tape.value(q1);
    out.q2 = tape.value(q2);
    return out;
}

namespace {

// same accumulation order as Tape::linear, so results are bit-identical
Mat linear_infer(const Mat& x, const Tensor& w, const Tensor& b) {
    int out_dim = w.shape[1];
    Mat y(x.rows, out_dim);
    for (int r = 0; r < x.rows; ++r) {
        double* out = &y.d[static_cast<size_t>(r) * out_dim];
        for (int o = 0; o < out_dim; ++o) out[o] = b.data[static_cast<size_t>(o)];
        for (int i = 0; i < x.cols; ++i) {
            double xi = x.at(r, i);
            if (xi == 0.0) continue;
            const double* wrow = &w.data[static_cast<size_t>(i) * out_dim];
            for (int o = 0; o < out_dim; ++o) out[o] += xi * wrow[o];
        }
    }
    return y;
}

void relu_inplace(Mat& m) {
    for (double& v : m.d) v = std::max(0.0, v);
}

Mat slice_infer(const Mat& x, int begin, int count) {
    Mat y(x.rows, count);
    for (int r = 0; r < x.rows; ++r)
        for (int c = 0; c < count; ++c) y.at(r, c) = x.at(r, begin + c);
    return y;
}

Mat concat_infer(const Mat& a, const Mat& b) {
    Mat y(a.rows, a.cols + b.cols);
    for (int r = 0; r < a.rows; ++r) {
        for (int c = 0; c < a.cols; ++c) y.at(r, c) = a.at(r, c);
        for (int c = 0; c < b.cols; ++c) y.at(r, a.cols + c) = b.at(r, c);
    }
    return y;
}

}  // namespace

Mat infer_features(const ParamSet& p, const Mat& obs) {
    const NetworkSpec& spec = p.spec;
    if (obs.cols != spec.obs_dim())
        throw std::invalid_argument("infer_features: observation width mismatch");
    Mat v = linear_infer(slice_infer(obs, 0, spec.vision_in()), p.at("v1_w"), p.at("v1_b"));
    relu_inplace(v);
    v = linear_infer(v, p.at("v2_w"), p.at("v2_b"));
    relu_inplace(v);
    int onehot_begin = spec.vision_in();
    Mat enc = std::move(v);
    if (spec.multimodal) {
        Mat a = linear_infer(slice_infer(obs, spec.vision_in(), spec.audio_in()), p.at("a1_w"),
                             p.at("a1_b"));
        relu_inplace(a);
        enc = concat_infer(enc, a);
        onehot_begin += spec.audio_in();
    }
    Mat fused = linear_infer(enc, p.at("f_w"), p.at("f_b"));
    Mat embed = linear_infer(slice_infer(obs, onehot_begin, 10), p.at("e_w"), p.at("e_b"));
    for (size_t i = 0; i < fused.d.size(); ++i) fused.d[i] *= embed.d[i];
    return fused;
}

void infer_policy(const ParamSet& p, const Mat& obs, Mat& mean, Mat& log_std) {
    Mat feat = infer_features(p, obs);
    Mat h = linear_infer(feat, p.at("p1_w"), p.at("p1_b"));
    relu_inplace(h);
    Mat raw = linear_infer(h, p.at("p2_w"), p.at("p2_b"));
    mean = slice_infer(raw, 0, 2);
    log_std = slice_infer(raw, 2, 2);
    for (double& v : log_std.d) v = std::clamp(v, kLogStdMin, kLogStdMax);
}

Mat infer_q(const ParamSet& p, const Mat& features, const Mat& action, int head) {
    std::string pre = "q" + std::to_string(head);
    Mat in = concat_infer(features, action);
    Mat h = linear_infer(in, p.at(pre + "a_w"), p.at(pre + "a_b"));
    relu_inplace(h);
    return linear_infer(h, p.at(pre + "b_w"), p.at(pre + "b_b"));
}

namespace {

double mean_weighted(const Mat& x, const Mat& w) {
    double s = 0.0;
    for (size_t i = 0; i < x.d.size(); ++i) s += x.d[i] * w.d[i];
    return s / static_cast<double>(x.d.size());
}

double grad_check_loss(const ParamSet& p, const Mat& obs, const Mat& action, const Mat& wm,
                       const Mat& ws, const Mat& wq1, const Mat& wq2) {
    Mat mean, log_std;
    infer_policy(p, obs, mean, log_std);
    Mat feat = infer_features(p, obs);
    Mat q1 = infer_q(p, feat, action, 1);
    Mat q2 = infer_q(p, feat, action, 2);
    return mean_weighted(mean, wm) + mean_weighted(log_std, ws) + mean_weighted(q1, wq1) +
           mean_weighted(q2, wq2);
}

}  // namespace

GradCheckReport grad_check(const NetworkSpec& spec, uint64_t seed, double h,
                           int coords_per_param) {
    spec.validate();
    ParamSet p = make_params(spec, seed);
    Rng rng(Rng::derive(seed, 7));
    const int batch = 2;
    Mat obs(batch, spec.obs_dim());
    for (double& v : obs.d) v = rng.uniform();
    Mat action(batch, 2);
    for (int r = 0; r < batch; ++r) {
        action.at(r, 0) = rng.uniform();
        action.at(r, 1) = rng.uniform(-1.0, 1.0);
    }
    Mat wm(batch, 2), ws(batch, 2), wq1(batch, 1), wq2(batch, 1);
    for (double& v : wm.d) v = rng.uniform(-1.0, 1.0);
    for (double& v : ws.d) v = rng.uniform(-1.0, 1.0);
    for (double& v : wq1.d) v = rng.uniform(-1.0, 1.0);
    for (double& v : wq2.d) v = rng.uniform(-1.0, 1.0);

    // reverse-mode gradients of the same scalar
    Tape tape;
    int obs_node = tape.input(obs);
    int act_node = tape.input(action);
    PolicyNodes pn = policy_forward(tape, p, obs_node);
    int q1n = q_forward(tape, p, pn.features, act_node, 1);
    int q2n = q_forward(tape, p, pn.features, act_node, 2);
    int loss = tape.add(tape.add(tape.mean_all(tape.mul(pn.mean, tape.input(wm))),
                                 tape.mean_all(tape.mul(pn.log_std, tape.input(ws)))),
                        tape.add(tape.mean_all(tape.mul(q1n, tape.input(wq1))),
                                 tape.mean_all(tape.mul(q2n, tape.input(wq2)))));
    tape.backward(loss);

    GradCheckReport report;
    for (size_t pi = 0; pi < p.params.size(); ++pi) {
        const Tensor* g = tape.has_param_grad(static_cast<int>(pi))
                              ? &tape.param_grad(static_cast<int>(pi))
                              : nullptr;
        Tensor& t = p.params[pi].value;
        std::vector<size_t> coords(t.size());
        for (size_t i = 0; i < coords.size(); ++i) coords[i] = i;
        if (coords_per_param > 0 && coords.size() > static_cast<size_t>(coords_per_param)) {
            Rng pick(Rng::derive(seed, 5000 + pi));
            for (size_t i = 0; i < static_cast<size_t>(coords_per_param); ++i) {
                size_t j = i + static_cast<size_t>(pick.uniform_int(
                                   0, static_cast<int>(coords.size() - i) - 1));
                std::swap(coords[i], coords[j]);
            }
            coords.resize(static_cast<size_t>(coords_per_param));
        }
        for (size_t i : coords) {
            double orig = t.data[i];
            auto central = [&](double step) {
                t.data[i] = orig + step;
                double lp = grad_check_loss(p, obs, action, wm, ws, wq1, wq2);
                t.data[i] = orig - step;
                double lm = grad_check_loss(p, obs, action, wm, ws, wq1, wq2);
                t.data[i] = orig;
                return (lp - lm) / (2.0 * step);
            };
            double fd = central(h);
            double fd_half = central(0.5 * h);
            // a relu kink inside the stencil makes the finite difference itself
            // inconsistent across step sizes; skip such coordinates
            if (std::fabs(fd - fd_half) >
                1e-3 * std::max({std::fabs(fd), std::fabs(fd_half), 1e-3}))
                continue;
            double ad = g ? g->data[i] : 0.0;
            double rel = std::fabs(ad - fd) / std::max({std::fabs(ad), std::fabs(fd), 1e-3});
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_param = p.params[pi].name;
            }
        }
    }
    return report;
}

}  // namespace playroom
