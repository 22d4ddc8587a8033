#include "playroom/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace playroom {

namespace {

void check_same_shape(const Mat& a, const Mat& b, const char* what) {
    if (a.rows != b.rows || a.cols != b.cols)
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

}  // namespace

int Tape::push(Node n) {
    n.grad = Mat(n.value.rows, n.value.cols);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

int Tape::input(Mat value) {
    Node n;
    n.op = Op::Input;
    n.value = std::move(value);
    return push(std::move(n));
}

int Tape::param(int param_index, const Tensor& value, bool is_bias) {
    Node n;
    n.op = Op::Param;
    n.param_index = param_index;
    n.is_bias = is_bias;
    if (is_bias) {
        n.value = Mat(1, static_cast<int>(value.size()));
        std::copy(value.data.begin(), value.data.end(), n.value.d.begin());
    } else {
        if (value.shape.size() != 2) throw std::invalid_argument("Tape::param: weight must be 2-d");
        n.value = Mat(value.shape[0], value.shape[1]);
        n.value.d = value.data;
    }
    return push(std::move(n));
}

int Tape::linear(int x, int w, int b) {
    const Mat& xv = nodes_[static_cast<size_t>(x)].value;
    const Mat& wv = nodes_[static_cast<size_t>(w)].value;
    const Mat& bv = nodes_[static_cast<size_t>(b)].value;
    if (xv.cols != wv.rows || bv.cols != wv.cols)
        throw std::invalid_argument("Tape::linear: shape mismatch");
    Node n;
    n.op = Op::Linear;
    n.a = x;
    n.b = w;
    n.c = b;
    n.value = Mat(xv.rows, wv.cols);
    for (int r = 0; r < xv.rows; ++r) {
        double* out = &n.value.d[static_cast<size_t>(r) * wv.cols];
        for (int o = 0; o < wv.cols; ++o) out[o] = bv.d[static_cast<size_t>(o)];
        for (int i = 0; i < xv.cols; ++i) {
            double xi = xv.at(r, i);
            if (xi == 0.0) continue;
            const double* wrow = &wv.d[static_cast<size_t>(i) * wv.cols];
            for (int o = 0; o < wv.cols; ++o) out[o] += xi * wrow[o];
        }
    }
    return push(std::move(n));
}

int Tape::relu(int x) {
    Node n;
    n.op = Op::Relu;
    n.a = x;
    n.value = nodes_[static_cast<size_t>(x)].value;
    for (double& v : n.value.d) v = std::max(0.0, v);
    return push(std::move(n));
}

int Tape::tanh_op(int x) {
    Node n;
    n.op = Op::Tanh;
    n.a = x;
    n.value = nodes_[static_cast<size_t>(x)].value;
    for (double& v : n.value.d) v = std::tanh(v);
    return push(std::move(n));
}

int Tape::exp_op(int x) {
    Node n;
    n.op = Op::Exp;
    n.a = x;
    n.value = nodes_[static_cast<size_t>(x)].value;
    for (double& v : n.value.d) v = std::exp(v);
    return push(std::move(n));
}

int Tape::log_op(int x) {
    Node n;
    n.op = Op::Log;
    n.a = x;
    n.value = nodes_[static_cast<size_t>(x)].value;
    for (double& v : n.value.d) v = std::log(v);
    return push(std::move(n));
}

int Tape::square(int x) {
    Node n;
    n.op = Op::Square;
    n.a = x;
    n.value = nodes_[static_cast<size_t>(x)].value;
    for (double& v : n.value.d) v = v * v;
    return push(std::move(n));
}

int Tape::add(int a, int b) {
    Node n;
    n.op = Op::Add;
    n.a = a;
    n.b = b;
    check_same_shape(nodes_[static_cast<size_t>(a)].value, nodes_[static_cast<size_t>(b)].value, "add");
    n.value = nodes_[static_cast<size_t>(a)].value;
    const Mat& bv = nodes_[static_cast<size_t>(b)].value;
    for (size_t i = 0; i < n.value.d.size(); ++i) n.value.d[i] += bv.d[i];
    return push(std::move(n));
}

int Tape::sub(int a, int b) {
    Node n;
    n.op = Op::Sub;
    n.a = a;
    n.b = b;
    check_same_shape(nodes_[static_cast<size_t>(a)].value, nodes_[static_cast<size_t>(b)].value, "sub");
    n.value = nodes_[static_cast<size_t>(a)].value;
    const Mat& bv = nodes_[static_cast<size_t>(b)].value;
    for (size_t i = 0; i < n.value.d.size(); ++i) n.value.d[i] -= bv.d[i];
    return push(std::move(n));
}

int Tape::mul(int a, int b) {
    Node n;
    n.op = Op::Mul;
    n.a = a;
    n.b = b;
    check_same_shape(nodes_[static_cast<size_t>(a)].value, nodes_[static_cast<size_t>(b)].value, "mul");
    n.value = nodes_[static_cast<size_t>(a)].value;
    const Mat& bv = nodes_[static_cast<size_t>(b)].value;
    for (size_t i = 0; i < n.value.d.size(); ++i) n.value.d[i] *= bv.d[i];
    return push(std::move(n));
}

int Tape::min_op(int a, int b) {
    Node n;
    n.op = Op::Min;
    n.a = a;
    n.b = b;
    check_same_shape(nodes_[static_cast<size_t>(a)].value, nodes_[static_cast<size_t>(b)].value, "min");
    n.value = nodes_[static_cast<size_t>(a)].value;
    const Mat& bv = nodes_[static_cast<size_t>(b)].value;
    for (size_t i = 0; i < n.value.d.size(); ++i) n.value.d[i] = std::min(n.value.d[i], bv.d[i]);
    return push(std::move(n));
}

int Tape::affine(int x, double a, double b) {
    Node n;
    n.op = Op::Affine;
    n.a = x;
    n.s0 = a;
    n.s1 = b;
    n.value = nodes_[static_cast<size_t>(x)].value;
    for (double& v : n.value.d) v = a * v + b;
    return push(std::move(n));
}

int Tape::clamp(int x, double lo, double hi) {
    Node n;
    n.op = Op::Clamp;
    n.a = x;
    n.s0 = lo;
    n.s1 = hi;
    n.value = nodes_[static_cast<size_t>(x)].value;
    for (double& v : n.value.d) v = std::clamp(v, lo, hi);
    return push(std::move(n));
}

int Tape::concat_cols(int a, int b) {
    const Mat& av = nodes_[static_cast<size_t>(a)].value;
    const Mat& bv = nodes_[static_cast<size_t>(b)].value;
    if (av.rows != bv.rows) throw std::invalid_argument("concat_cols: row mismatch");
    Node n;
    n.op = Op::ConcatCols;
    n.a = a;
    n.b = b;
    n.value = Mat(av.rows, av.cols + bv.cols);
    for (int r = 0; r < av.rows; ++r) {
        for (int c = 0; c < av.cols; ++c) n.value.at(r, c) = av.at(r, c);
        for (int c = 0; c < bv.cols; ++c) n.value.at(r, av.cols + c) = bv.at(r, c);
    }
    return push(std::move(n));
}

int Tape::slice_cols(int x, int begin, int count) {
    const Mat& xv = nodes_[static_cast<size_t>(x)].value;
    if (begin < 0 || begin + count > xv.cols) throw std::invalid_argument("slice_cols: out of range");
    Node n;
    n.op = Op::SliceCols;
    n.a = x;
    n.s0 = begin;
    n.value = Mat(xv.rows, count);
    for (int r = 0; r < xv.rows; ++r)
        for (int c = 0; c < count; ++c) n.value.at(r, c) = xv.at(r, begin + c);
    return push(std::move(n));
}

int Tape::sum_cols(int x) {
    const Mat& xv = nodes_[static_cast<size_t>(x)].value;
    Node n;
    n.op = Op::SumCols;
    n.a = x;
    n.value = Mat(xv.rows, 1);
    for (int r = 0; r < xv.rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < xv.cols; ++c) s += xv.at(r, c);
        n.value.at(r, 0) = s;
    }
    return push(std::move(n));
}

int Tape::mean_all(int x) {
    const Mat& xv = nodes_[static_cast<size_t>(x)].value;
    Node n;
    n.op = Op::MeanAll;
    n.a = x;
    n.value = Mat(1, 1);
    double s = 0.0;
    for (double v : xv.d) s += v;
    n.value.at(0, 0) = s / static_cast<double>(xv.d.size());
    return push(std::move(n));
}

int Tape::softmax_xent(int x, const std::vector<int>& labels) {
    const Mat& xv = nodes_[static_cast<size_t>(x)].value;
    if (static_cast<int>(labels.size()) != xv.rows)
        throw std::invalid_argument("softmax_xent: label count mismatch");
    Node n;
    n.op = Op::SoftmaxXent;
    n.a = x;
    n.labels = labels;
    n.value = Mat(1, 1);
    double total = 0.0;
    for (int r = 0; r < xv.rows; ++r) {
        double mx = xv.at(r, 0);
        for (int c = 1; c < xv.cols; ++c) mx = std::max(mx, xv.at(r, c));
        double z = 0.0;
        for (int c = 0; c < xv.cols; ++c) z += std::exp(xv.at(r, c) - mx);
        total += std::log(z) + mx - xv.at(r, labels[static_cast<size_t>(r)]);
    }
    n.value.at(0, 0) = total / xv.rows;
    return push(std::move(n));
}

void Tape::backward(int loss) {
    Node& ln = nodes_[static_cast<size_t>(loss)];
    if (ln.value.rows != 1 || ln.value.cols != 1)
        throw std::invalid_argument("Tape::backward: loss must be scalar");
    ln.grad.at(0, 0) = 1.0;

    for (int id = loss; id >= 0; --id) {
        Node& n = nodes_[static_cast<size_t>(id)];
        bool all_zero = true;
        for (double g : n.grad.d)
            if (g != 0.0) {
                all_zero = false;
                break;
            }
        if (all_zero && n.op != Op::Param) continue;
        switch (n.op) {
            case Op::Input:
                break;
            case Op::Param: {
                auto it = std::find_if(param_grads_.begin(), param_grads_.end(),
                                       [&](const auto& p) { return p.first == n.param_index; });
                if (it == param_grads_.end()) {
                    Tensor g;
                    if (n.is_bias)
                        g = Tensor({n.value.cols});
                    else
                        g = Tensor({n.value.rows, n.value.cols});
                    param_grads_.emplace_back(n.param_index, std::move(g));
                    it = param_grads_.end() - 1;
                }
                for (size_t i = 0; i < n.grad.d.size(); ++i) it->second.data[i] += n.grad.d[i];
                break;
            }
            case Op::Linear: {
                Node& xn = nodes_[static_cast<size_t>(n.a)];
                Node& wn = nodes_[static_cast<size_t>(n.b)];
                Node& bn = nodes_[static_cast<size_t>(n.c)];
                const Mat& xv = xn.value;
                const Mat& wv = wn.value;
                for (int r = 0; r < xv.rows; ++r) {
                    const double* gy = &n.grad.d[static_cast<size_t>(r) * wv.cols];
                    // dX = dY W^T ; dW += X^T dY
                    for (int i = 0; i < xv.cols; ++i) {
                        const double* wrow = &wv.d[static_cast<size_t>(i) * wv.cols];
                        double* gwrow = &wn.grad.d[static_cast<size_t>(i) * wv.cols];
                        double xi = xv.at(r, i);
                        double acc = 0.0;
                        for (int o = 0; o < wv.cols; ++o) {
                            acc += gy[o] * wrow[o];
                            gwrow[o] += xi * gy[o];
                        }
                        xn.grad.at(r, i) += acc;
                    }
                    for (int o = 0; o < wv.cols; ++o) bn.grad.at(0, o) += gy[o];
                }
                break;
            }
            case Op::Relu: {
                Node& xn = nodes_[static_cast<size_t>(n.a)];
                for (size_t i = 0; i < n.grad.d.size(); ++i)
                    if (xn.value.d[i] > 0.0) xn.grad.d[i] += n.grad.d[i];
                break;
            }
            case Op::Tanh: {
                Node& xn = nodes_[static_cast<size_t>(n.a)];
                for (size_t i = 0; i < n.grad.d.size(); ++i)
                    xn.grad.d[i] += n.grad.d[i] * (1.0 - n.value.d[i] * n.value.d[i]);
                break;
            }
            case Op::Exp: {
                Node& xn = nodes_[static_cast<size_t>(n.a)];
                for (size_t i = 0; i < n.grad.d.size(); ++i)
                    xn.grad.d[i] += n.grad.d[i] * n.value.d[i];
                break;
            }
            case Op::Log: {
                Node& xn = nodes_[static_cast<size_t>(n.a)];
                for (size_t i = 0; i < n.grad.d.size(); ++i)
                    xn.grad.d[i] += n.grad.d[i] / xn.value.d[i];
                break;
            }
            case Op::Square: {
                Node& xn = nodes_[static_cast<size_t>(n.a)];
                for (size_t i = 0; i < n.grad.d.size(); ++i)
                    xn.grad.d[i] += n.grad.d[i] * 2.0 * xn.value.d[i];
                break;
            }
            case Op::Add: {
                Node& an = nodes_[static_cast<size_t>(n.a)];
                Node& bn = nodes_[static_cast<size_t>(n.b)];
                for (size_t i = 0; i < n.grad.d.size(); ++i) {
                    an.grad.d[i] += n.grad.d[i];
                    bn.grad.d[i] += n.grad.d[i];
                }
                break;
            }
            case Op::Sub: {
                Node& an = nodes_[static_cast<size_t>(n.a)];
                Node& bn = nodes_[static_cast<size_t>(n.b)];
                for (size_t i = 0; i < n.grad.d.size(); ++i) {
                    an.grad.d[i] += n.grad.d[i];
                    bn.grad.d[i] -= n.grad.d[i];
                }
                break;
            }
            case Op::Mul: {
                Node& an = nodes_[static_cast<size_t>(n.a)];
                Node& bn = nodes_[static_cast<size_t>(n.b)];
                for (size_t i = 0; i < n.grad.d.size(); ++i) {
                    an.grad.d[i] += n.grad.d[i] * bn.value.d[i];
                    bn.grad.d[i] += n.grad.d[i] * an.value.d[i];
                }
                break;
            }
            case Op::Min: {
                Node& an = nodes_[static_cast<size_t>(n.a)];
                Node& bn = nodes_[static_cast<size_t>(n.b)];
                for (size_t i = 0; i < n.grad.d.size(); ++i) {
                    if (an.value.d[i] <= bn.value.d[i])
                        an.grad.d[i] += n.grad.d[i];
                    else
                        bn.grad.d[i] += n.grad.d[i];
                }
                break;
            }
            case Op::Affine: {
                Node& xn = nodes_[static_cast<size_t>(n.a)];
                for (size_t i = 0; i < n.grad.d.size(); ++i) xn.grad.d[i] += n.grad.d[i] * n.s0;
                break;
            }
            case Op::Clamp: {
                Node& xn = nodes_[static_cast<size_t>(n.a)];
                for (size_t i = 0; i < n.grad.d.size(); ++i)
                    if (xn.value.d[i] > n.s0 && xn.value.d[i] < n.s1)
                        xn.grad.d[i] += n.grad.d[i];
                break;
            }
            case Op::ConcatCols: {
                Node& an = nodes_[static_cast<size_t>(n.a)];
                Node& bn = nodes_[static_cast<size_t>(n.b)];
                for (int r = 0; r < n.grad.rows; ++r) {
                    for (int c = 0; c < an.value.cols; ++c) an.grad.at(r, c) += n.grad.at(r, c);
                    for (int c = 0; c < bn.value.cols; ++c)
                        bn.grad.at(r, c) += n.grad.at(r, an.value.cols + c);
                }
                break;
            }
            case Op::SliceCols: {
                Node& xn = nodes_[static_cast<size_t>(n.a)];
                int begin = static_cast<int>(n.s0);
                for (int r = 0; r < n.grad.rows; ++r)
                    for (int c = 0; c < n.grad.cols; ++c)
                        xn.grad.at(r, begin + c) += n.grad.at(r, c);
                break;
            }
            case Op::SumCols: {
                Node& xn = nodes_[static_cast<size_t>(n.a)];
                for (int r = 0; r < xn.value.rows; ++r)
                    for (int c = 0; c < xn.value.cols; ++c)
                        xn.grad.at(r, c) += n.grad.at(r, 0);
                break;
            }
            case Op::MeanAll: {
                Node& xn = nodes_[static_cast<size_t>(n.a)];
                double g = n.grad.at(0, 0) / static_cast<double>(xn.value.d.size());
                for (double& v : xn.grad.d) v += g;
                break;
            }
            case Op::SoftmaxXent: {
                Node& xn = nodes_[static_cast<size_t>(n.a)];
                const Mat& xv = xn.value;
                double g = n.grad.at(0, 0) / xv.rows;
                for (int r = 0; r < xv.rows; ++r) {
                    double mx = xv.at(r, 0);
                    for (int c = 1; c < xv.cols; ++c) mx = std::max(mx, xv.at(r, c));
                    double z = 0.0;
                    for (int c = 0; c < xv.cols; ++c) z += std::exp(xv.at(r, c) - mx);
                    for (int c = 0; c < xv.cols; ++c) {
                        double p = std::exp(xv.at(r, c) - mx) / z;
                        xn.grad.at(r, c) +=
                            g * (p - (c == n.labels[static_cast<size_t>(r)] ? 1.0 : 0.0));
                    }
                }
                break;
            }
        }
    }
}

bool Tape::has_param_grad(int param_index) const {
    for (const auto& [idx, g] : param_grads_)
        if (idx == param_index) return true;
    return false;
}

const Tensor& Tape::param_grad(int param_index) const {
    for (const auto& [idx, g] : param_grads_)
        if (idx == param_index) return g;
    throw std::invalid_argument("Tape::param_grad: no gradient for parameter");
}

}  // namespace playroom
