#pragma once

#include <poll.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "sparsecert/errors.hpp"
#include "sparsecert/rng.hpp"
#include "sparsecert/types.hpp"

namespace sparsecert::smoothing {

// Pluggable base classifier. May be internally randomized; must be total
// over {0,...,K-1}^d.
class BaseClassifier {
  public:
    virtual ~BaseClassifier() = default;
    virtual int classify(const DiscreteVector& v) = 0;
};

class ConstantClassifier : public BaseClassifier {
  public:
    explicit ConstantClassifier(int label) : label_(label) {}
    int classify(const DiscreteVector&) override { return label_; }

  private:
    int label_;
};

// Value of a single feature against a threshold: class 1 iff v[i] >= t.
class ThresholdClassifier : public BaseClassifier {
  public:
    ThresholdClassifier(std::size_t feature, std::int32_t threshold = 1)
        : feature_(feature), threshold_(threshold) {}
    int classify(const DiscreteVector& v) override {
        if (feature_ >= v.dims()) throw RangeError("threshold classifier: feature index out of range");
        return v.values[feature_] >= threshold_ ? 1 : 0;
    }

  private:
    std::size_t feature_;
    std::int32_t threshold_;
};

// Majority over the first k dimensions (nonzero entries count as votes).
class MajorityClassifier : public BaseClassifier {
  public:
    explicit MajorityClassifier(std::size_t k) : k_(k) {}
    int classify(const DiscreteVector& v) override {
        const std::size_t k = std::min(k_, v.dims());
        std::size_t ones = 0;
        for (std::size_t i = 0; i < k; ++i)
            if (v.values[i] != 0) ++ones;
        return 2 * ones > k ? 1 : 0;
    }

  private:
    std::size_t k_;
};

// Fixed-weight (or perceptron-fitted) linear score; class 1 iff w.v + b > 0.
class LinearClassifier : public BaseClassifier {
  public:
    LinearClassifier(std::vector<double> weights, double bias) : weights_(std::move(weights)), bias_(bias) {}

    int classify(const DiscreteVector& v) override {
        if (v.dims() != weights_.size()) throw RangeError("linear classifier: dimension mismatch");
        double score = bias_;
        for (std::size_t i = 0; i < weights_.size(); ++i) score += weights_[i] * v.values[i];
        return score > 0 ? 1 : 0;
    }

    // Perceptron passes over the data. With augment_noise set, each sample is
    // perturbed once per pass before the update (noise-augmented training
    // with a single draw per example).
    template <typename PerturbFn>
    void fit(const std::vector<DiscreteVector>& data, const std::vector<int>& labels, int passes,
             bool augment_noise, PerturbFn&& perturb_once) {
        if (data.size() != labels.size()) throw RangeError("fit: data/label size mismatch");
        for (int pass = 0; pass < passes; ++pass) {
            for (std::size_t i = 0; i < data.size(); ++i) {
                DiscreteVector v = augment_noise ? perturb_once(data[i], pass, i) : data[i];
                int predicted = classify(v);
                int target = labels[i];
                if (predicted == target) continue;
                double step = target == 1 ? 1.0 : -1.0;
                for (std::size_t j = 0; j < weights_.size(); ++j) weights_[j] += step * v.values[j];
                bias_ += step;
            }
        }
    }

  private:
    std::vector<double> weights_;
    double bias_;
};

// External classifier over a line-delimited pipe protocol: one vector per
// line out (space-separated integers), one class id per line back. Requests
// are serialized, so a deterministic external model gives reproducible votes
// at any thread count.
class ProcessClassifier : public BaseClassifier {
  public:
    explicit ProcessClassifier(const std::string& command) {
        int to_child[2], from_child[2];
        if (pipe(to_child) != 0 || pipe(from_child) != 0)
            throw std::runtime_error("process classifier: pipe failed");
        pid_ = fork();
        if (pid_ < 0) throw std::runtime_error("process classifier: fork failed");
        if (pid_ == 0) {
            dup2(to_child[0], STDIN_FILENO);
            dup2(from_child[1], STDOUT_FILENO);
            close(to_child[0]);
            close(to_child[1]);
            close(from_child[0]);
            close(from_child[1]);
            execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
            _exit(127);
        }
        close(to_child[0]);
        close(from_child[1]);
        write_fd_ = to_child[1];
        read_fd_ = from_child[0];
    }

    ProcessClassifier(const ProcessClassifier&) = delete;
    ProcessClassifier& operator=(const ProcessClassifier&) = delete;

    ~ProcessClassifier() override {
        if (write_fd_ >= 0) close(write_fd_);
        if (read_fd_ >= 0) close(read_fd_);
        if (pid_ > 0) {
            int status = 0;
            waitpid(pid_, &status, 0);
        }
    }

    int classify(const DiscreteVector& v) override {
        std::lock_guard<std::mutex> lock(mu_);
        std::string line;
        line.reserve(v.dims() * 3);
        for (std::size_t i = 0; i < v.dims(); ++i) {
            if (i) line.push_back(' ');
            line += std::to_string(v.values[i]);
        }
        line.push_back('\n');
        write_all(line);
        return read_class();
    }

  private:
    void write_all(const std::string& data) {
        std::size_t off = 0;
        while (off < data.size()) {
            ssize_t n = ::write(write_fd_, data.data() + off, data.size() - off);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw std::runtime_error("process classifier: write failed: " + std::string(std::strerror(errno)));
            }
            off += static_cast<std::size_t>(n);
        }
    }

    int read_class() {
        std::string line;
        for (;;) {
            if (buf_pos_ >= buffer_.size()) {
                char chunk[256];
                ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
                if (n < 0) {
                    if (errno == EINTR) continue;
                    throw std::runtime_error("process classifier: read failed");
                }
                if (n == 0) throw std::runtime_error("process classifier: unexpected EOF from external model");
                buffer_.assign(chunk, static_cast<std::size_t>(n));
                buf_pos_ = 0;
            }
            char c = buffer_[buf_pos_++];
            if (c == '\n') break;
            line.push_back(c);
        }
        try {
            return std::stoi(line);
        } catch (const std::exception&) {
            throw ParseError("process classifier: expected class id, got '" + line + "'");
        }
    }

    pid_t pid_ = -1;
    int write_fd_ = -1;
    int read_fd_ = -1;
    std::string buffer_;
    std::size_t buf_pos_ = 0;
    std::mutex mu_;
};

}  // namespace sparsecert::smoothing
