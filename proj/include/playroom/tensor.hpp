#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace playroom {

// flat-storage tensor; parameters and gradients are stored this way
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<int> s) : shape(std::move(s)) {
        size_t n = 1;
        for (int d : shape) n *= static_cast<size_t>(d);
        data.assign(n, 0.0);
    }
    size_t size() const { return data.size(); }
};

// dense row-major matrix used for batched activations
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> d;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), d(static_cast<size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return d[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return d[static_cast<size_t>(r) * cols + c]; }
};

// Reverse-mode tape over matrix ops. Parameters enter through param() with an
// external index; after backward(), their gradients are in param_grad(index).
class Tape {
public:
    int input(Mat value);

    // registers a parameter matrix; `param_index` keys the gradient slot.
    // Weight tensors are [in, out]; bias tensors are [out].
    int param(int param_index, const Tensor& value, bool is_bias);

    int linear(int x, int w, int b);       // y = xW + b
    int relu(int x);
    int tanh_op(int x);
    int exp_op(int x);
    int log_op(int x);
    int square(int x);
    int add(int a, int b);
    int sub(int a, int b);
    int mul(int a, int b);                 // elementwise
    int min_op(int a, int b);              // elementwise min
    int affine(int x, double a, double b); // a*x + b
    int clamp(int x, double lo, double hi);
    int concat_cols(int a, int b);
    int slice_cols(int x, int begin, int count);
    int sum_cols(int x);                   // rows x 1
    int mean_all(int x);                   // 1 x 1
    // mean over rows of softmax cross-entropy against integer labels
    int softmax_xent(int x, const std::vector<int>& labels);

    const Mat& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }

    // seeds d(loss)/d(loss) = 1 (loss must be 1x1) and runs the tape backward
    void backward(int loss);

    bool has_param_grad(int param_index) const;
    const Tensor& param_grad(int param_index) const;

private:
    enum class Op {
        Input, Param, Linear, Relu, Tanh, Exp, Log, Square, Add, Sub, Mul, Min,
        Affine, Clamp, ConcatCols, SliceCols, SumCols, MeanAll, SoftmaxXent
    };
    struct Node {
        Op op;
        int a = -1, b = -1, c = -1;
        Mat value;
        Mat grad;
        double s0 = 0.0, s1 = 0.0;
        int param_index = -1;
        bool is_bias = false;
        std::vector<int> labels;
    };
    int push(Node n);
    std::vector<Node> nodes_;
    std::vector<std::pair<int, Tensor>> param_grads_;  // param_index -> grad
};

}  // namespace playroom
