#include "toric/matching.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <string>

namespace toric {

namespace {

// Maximum-weight matching in a general graph, primal-dual blossom method
// with explicit blossom bookkeeping (the classic single-tree formulation
// with delta_1..delta_4 dual adjustments). Runs in max-cardinality mode,
// which is how minimum-weight perfect matching on a complete graph reduces
// to it. Everything below is deterministic: scan order follows vertex and
// edge indices, and the queue is LIFO.
//
// Blossom ids: 0..n-1 are the vertices themselves, n..2n-1 are available
// for nontrivial blossoms. "Endpoints" address edge sides: endpoint 2k is
// edge k seen from its first vertex, 2k+1 from its second.
class BlossomMatcher {
public:
    struct Edge {
        int i;
        int j;
        double w;
    };

    BlossomMatcher(int n, std::vector<Edge> edge_list)
        : nv_(n), edges_(std::move(edge_list)), ne_(static_cast<int>(edges_.size())) {
        double maxweight = 0.0;
        for (const Edge& e : edges_) {
            maxweight = std::max(maxweight, e.w);
        }
        endpoint_.resize(static_cast<std::size_t>(2 * ne_));
        neighbend_.resize(static_cast<std::size_t>(nv_));
        for (int k = 0; k < ne_; ++k) {
            endpoint_[static_cast<std::size_t>(2 * k)] = edges_[static_cast<std::size_t>(k)].i;
            endpoint_[static_cast<std::size_t>(2 * k + 1)] = edges_[static_cast<std::size_t>(k)].j;
            neighbend_[static_cast<std::size_t>(edges_[static_cast<std::size_t>(k)].i)]
                .push_back(2 * k + 1);
            neighbend_[static_cast<std::size_t>(edges_[static_cast<std::size_t>(k)].j)]
                .push_back(2 * k);
        }
        mate_.assign(static_cast<std::size_t>(nv_), -1);
        label_.assign(static_cast<std::size_t>(2 * nv_), 0);
        labelend_.assign(static_cast<std::size_t>(2 * nv_), -1);
        inblossom_.resize(static_cast<std::size_t>(nv_));
        for (int v = 0; v < nv_; ++v) {
            inblossom_[static_cast<std::size_t>(v)] = v;
        }
        blossomparent_.assign(static_cast<std::size_t>(2 * nv_), -1);
        blossomchilds_.assign(static_cast<std::size_t>(2 * nv_), {});
        blossombase_.resize(static_cast<std::size_t>(2 * nv_));
        for (int v = 0; v < nv_; ++v) {
            blossombase_[static_cast<std::size_t>(v)] = v;
        }
        for (int b = nv_; b < 2 * nv_; ++b) {
            blossombase_[static_cast<std::size_t>(b)] = -1;
        }
        blossomendps_.assign(static_cast<std::size_t>(2 * nv_), {});
        bestedge_.assign(static_cast<std::size_t>(2 * nv_), -1);
        blossombestedges_.assign(static_cast<std::size_t>(2 * nv_), {});
        has_best_list_.assign(static_cast<std::size_t>(2 * nv_), false);
        for (int b = 2 * nv_ - 1; b >= nv_; --b) {
            unusedblossoms_.push_back(b);
        }
        dualvar_.assign(static_cast<std::size_t>(2 * nv_), 0.0);
        for (int v = 0; v < nv_; ++v) {
            dualvar_[static_cast<std::size_t>(v)] = maxweight;
        }
        allowedge_.assign(static_cast<std::size_t>(ne_), false);
    }

    // mate[v] = partner vertex, -1 if unmatched.
    std::vector<int> solve() {
        for (int stage = 0; stage < nv_; ++stage) {
            std::fill(label_.begin(), label_.end(), 0);
            std::fill(bestedge_.begin(), bestedge_.end(), -1);
            for (int b = nv_; b < 2 * nv_; ++b) {
                has_best_list_[static_cast<std::size_t>(b)] = false;
                blossombestedges_[static_cast<std::size_t>(b)].clear();
            }
            std::fill(allowedge_.begin(), allowedge_.end(), false);
            queue_.clear();

            for (int v = 0; v < nv_; ++v) {
                if (mate_[static_cast<std::size_t>(v)] == -1 &&
                    label_[static_cast<std::size_t>(inblossom_[static_cast<std::size_t>(v)])] == 0) {
                    assign_label(v, 1, -1);
                }
            }

            bool augmented = false;
            for (;;) {
                while (!queue_.empty() && !augmented) {
                    int v = queue_.back();
                    queue_.pop_back();
                    assert(label_[static_cast<std::size_t>(inblossom_[static_cast<std::size_t>(v)])] == 1);

                    for (int p : neighbend_[static_cast<std::size_t>(v)]) {
                        int k = p / 2;
                        int w = endpoint_[static_cast<std::size_t>(p)];
                        if (inblossom_[static_cast<std::size_t>(v)] ==
                            inblossom_[static_cast<std::size_t>(w)]) {
                            continue;  // internal edge of a blossom
                        }
                        double kslack = 0.0;
                        if (!allowedge_[static_cast<std::size_t>(k)]) {
                            kslack = slack(k);
                            if (kslack <= 0.0) {
                                allowedge_[static_cast<std::size_t>(k)] = true;
                            }
                        }
                        if (allowedge_[static_cast<std::size_t>(k)]) {
                            int bw = inblossom_[static_cast<std::size_t>(w)];
                            if (label_[static_cast<std::size_t>(bw)] == 0) {
                                // w is free; tag it T, its mate becomes S.
                                assign_label(w, 2, p ^ 1);
                            } else if (label_[static_cast<std::size_t>(bw)] == 1) {
                                // Two S-trees meet: either a new blossom or
                                // an augmenting path.
                                int base = scan_blossom(v, w);
                                if (base >= 0) {
                                    add_blossom(base, k);
                                } else {
                                    augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if (label_[static_cast<std::size_t>(w)] == 0) {
                                // w sits inside a T-blossom but carries no
                                // label of its own yet; it needs one for a
                                // later expansion.
                                label_[static_cast<std::size_t>(w)] = 2;
                                labelend_[static_cast<std::size_t>(w)] = p ^ 1;
                            }
                        } else if (label_[static_cast<std::size_t>(
                                       inblossom_[static_cast<std::size_t>(w)])] == 1) {
                            int b = inblossom_[static_cast<std::size_t>(v)];
                            if (bestedge_[static_cast<std::size_t>(b)] == -1 ||
                                kslack < slack(bestedge_[static_cast<std::size_t>(b)])) {
                                bestedge_[static_cast<std::size_t>(b)] = k;
                            }
                        } else if (label_[static_cast<std::size_t>(w)] == 0) {
                            if (bestedge_[static_cast<std::size_t>(w)] == -1 ||
                                kslack < slack(bestedge_[static_cast<std::size_t>(w)])) {
                                bestedge_[static_cast<std::size_t>(w)] = k;
                            }
                        }
                    }
                }
                if (augmented) {
                    break;
                }

                // No augmenting path under the current duals; pick the
                // smallest dual adjustment that creates new tight edges.
                int deltatype = -1;
                double delta = 0.0;
                int deltaedge = -1;
                int deltablossom = -1;

                for (int v = 0; v < nv_; ++v) {
                    if (label_[static_cast<std::size_t>(inblossom_[static_cast<std::size_t>(v)])] == 0 &&
                        bestedge_[static_cast<std::size_t>(v)] != -1) {
                        double d = slack(bestedge_[static_cast<std::size_t>(v)]);
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 2;
                            deltaedge = bestedge_[static_cast<std::size_t>(v)];
                        }
                    }
                }
                for (int b = 0; b < 2 * nv_; ++b) {
                    if (blossomparent_[static_cast<std::size_t>(b)] == -1 &&
                        label_[static_cast<std::size_t>(b)] == 1 &&
                        bestedge_[static_cast<std::size_t>(b)] != -1) {
                        double d = slack(bestedge_[static_cast<std::size_t>(b)]) / 2.0;
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 3;
                            deltaedge = bestedge_[static_cast<std::size_t>(b)];
                        }
                    }
                }
                for (int b = nv_; b < 2 * nv_; ++b) {
                    if (blossombase_[static_cast<std::size_t>(b)] >= 0 &&
                        blossomparent_[static_cast<std::size_t>(b)] == -1 &&
                        label_[static_cast<std::size_t>(b)] == 2 &&
                        (deltatype == -1 || dualvar_[static_cast<std::size_t>(b)] < delta)) {
                        delta = dualvar_[static_cast<std::size_t>(b)];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if (deltatype == -1) {
                    // Max-cardinality optimum reached; clamp vertex duals to
                    // keep them non-negative and stop.
                    deltatype = 1;
                    double dmin = dualvar_[0];
                    for (int v = 1; v < nv_; ++v) {
                        dmin = std::min(dmin, dualvar_[static_cast<std::size_t>(v)]);
                    }
                    delta = std::max(0.0, dmin);
                }

                for (int v = 0; v < nv_; ++v) {
                    int lb = label_[static_cast<std::size_t>(inblossom_[static_cast<std::size_t>(v)])];
                    if (lb == 1) {
                        dualvar_[static_cast<std::size_t>(v)] -= delta;
                    } else if (lb == 2) {
                        dualvar_[static_cast<std::size_t>(v)] += delta;
                    }
                }
                for (int b = nv_; b < 2 * nv_; ++b) {
                    if (blossombase_[static_cast<std::size_t>(b)] >= 0 &&
                        blossomparent_[static_cast<std::size_t>(b)] == -1) {
                        if (label_[static_cast<std::size_t>(b)] == 1) {
                            dualvar_[static_cast<std::size_t>(b)] += delta;
                        } else if (label_[static_cast<std::size_t>(b)] == 2) {
                            dualvar_[static_cast<std::size_t>(b)] -= delta;
                        }
                    }
                }

                if (deltatype == 1) {
                    break;
                } else if (deltatype == 2) {
                    allowedge_[static_cast<std::size_t>(deltaedge)] = true;
                    int i = edges_[static_cast<std::size_t>(deltaedge)].i;
                    if (label_[static_cast<std::size_t>(inblossom_[static_cast<std::size_t>(i)])] == 0) {
                        i = edges_[static_cast<std::size_t>(deltaedge)].j;
                    }
                    queue_.push_back(i);
                } else if (deltatype == 3) {
                    allowedge_[static_cast<std::size_t>(deltaedge)] = true;
                    queue_.push_back(edges_[static_cast<std::size_t>(deltaedge)].i);
                } else {
                    expand_blossom(deltablossom, false);
                }
            }

            if (!augmented) {
                break;
            }

            for (int b = nv_; b < 2 * nv_; ++b) {
                if (blossomparent_[static_cast<std::size_t>(b)] == -1 &&
                    blossombase_[static_cast<std::size_t>(b)] >= 0 &&
                    label_[static_cast<std::size_t>(b)] == 1 &&
                    dualvar_[static_cast<std::size_t>(b)] == 0.0) {
                    expand_blossom(b, true);
                }
            }
        }

        std::vector<int> result(static_cast<std::size_t>(nv_), -1);
        for (int v = 0; v < nv_; ++v) {
            if (mate_[static_cast<std::size_t>(v)] >= 0) {
                result[static_cast<std::size_t>(v)] =
                    endpoint_[static_cast<std::size_t>(mate_[static_cast<std::size_t>(v)])];
            }
        }
        return result;
    }

private:
    double slack(int k) const {
        const Edge& e = edges_[static_cast<std::size_t>(k)];
        return dualvar_[static_cast<std::size_t>(e.i)] +
               dualvar_[static_cast<std::size_t>(e.j)] - 2.0 * e.w;
    }

    void collect_leaves(int b, std::vector<int>& out) const {
        if (b < nv_) {
            out.push_back(b);
            return;
        }
        for (int child : blossomchilds_[static_cast<std::size_t>(b)]) {
            collect_leaves(child, out);
        }
    }

    std::vector<int> leaves(int b) const {
        std::vector<int> out;
        collect_leaves(b, out);
        return out;
    }

    void assign_label(int w, int t, int p) {
        int b = inblossom_[static_cast<std::size_t>(w)];
        assert(label_[static_cast<std::size_t>(w)] == 0 &&
               label_[static_cast<std::size_t>(b)] == 0);
        label_[static_cast<std::size_t>(w)] = t;
        label_[static_cast<std::size_t>(b)] = t;
        labelend_[static_cast<std::size_t>(w)] = p;
        labelend_[static_cast<std::size_t>(b)] = p;
        bestedge_[static_cast<std::size_t>(w)] = -1;
        bestedge_[static_cast<std::size_t>(b)] = -1;
        if (t == 1) {
            for (int v : leaves(b)) {
                queue_.push_back(v);
            }
        } else {
            int base = blossombase_[static_cast<std::size_t>(b)];
            assert(mate_[static_cast<std::size_t>(base)] >= 0);
            assign_label(endpoint_[static_cast<std::size_t>(mate_[static_cast<std::size_t>(base)])],
                         1, mate_[static_cast<std::size_t>(base)] ^ 1);
        }
    }

    // Trace back from both ends of a tight S-S edge; returns the base of a
    // common ancestor blossom, or -1 when the trees are rooted separately
    // (then the edge closes an augmenting path).
    int scan_blossom(int v, int w) {
        std::vector<int> path;
        int base = -1;
        while (v != -1 || w != -1) {
            int b = inblossom_[static_cast<std::size_t>(v)];
            if (label_[static_cast<std::size_t>(b)] & 4) {
                base = blossombase_[static_cast<std::size_t>(b)];
                break;
            }
            assert(label_[static_cast<std::size_t>(b)] == 1);
            path.push_back(b);
            label_[static_cast<std::size_t>(b)] = 5;
            assert(labelend_[static_cast<std::size_t>(b)] ==
                   mate_[static_cast<std::size_t>(blossombase_[static_cast<std::size_t>(b)])]);
            if (labelend_[static_cast<std::size_t>(b)] == -1) {
                v = -1;  // reached a tree root
            } else {
                v = endpoint_[static_cast<std::size_t>(labelend_[static_cast<std::size_t>(b)])];
                b = inblossom_[static_cast<std::size_t>(v)];
                assert(label_[static_cast<std::size_t>(b)] == 2);
                assert(labelend_[static_cast<std::size_t>(b)] >= 0);
                v = endpoint_[static_cast<std::size_t>(labelend_[static_cast<std::size_t>(b)])];
            }
            if (w != -1) {
                std::swap(v, w);
            }
        }
        for (int b : path) {
            label_[static_cast<std::size_t>(b)] = 1;
        }
        return base;
    }

    // Shrink the cycle through edge k and the common ancestor at `base`
    // into a new S-blossom.
    void add_blossom(int base, int k) {
        int v = edges_[static_cast<std::size_t>(k)].i;
        int w = edges_[static_cast<std::size_t>(k)].j;
        int bb = inblossom_[static_cast<std::size_t>(base)];
        int bv = inblossom_[static_cast<std::size_t>(v)];
        int bw = inblossom_[static_cast<std::size_t>(w)];

        int b = unusedblossoms_.back();
        unusedblossoms_.pop_back();

        blossombase_[static_cast<std::size_t>(b)] = base;
        blossomparent_[static_cast<std::size_t>(b)] = -1;
        blossomparent_[static_cast<std::size_t>(bb)] = b;

        std::vector<int>& path = blossomchilds_[static_cast<std::size_t>(b)];
        std::vector<int>& endps = blossomendps_[static_cast<std::size_t>(b)];
        path.clear();
        endps.clear();

        while (bv != bb) {
            blossomparent_[static_cast<std::size_t>(bv)] = b;
            path.push_back(bv);
            endps.push_back(labelend_[static_cast<std::size_t>(bv)]);
            assert(labelend_[static_cast<std::size_t>(bv)] >= 0);
            v = endpoint_[static_cast<std::size_t>(labelend_[static_cast<std::size_t>(bv)])];
            bv = inblossom_[static_cast<std::size_t>(v)];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(endps.begin(), endps.end());
        endps.push_back(2 * k);

        while (bw != bb) {
            blossomparent_[static_cast<std::size_t>(bw)] = b;
            path.push_back(bw);
            endps.push_back(labelend_[static_cast<std::size_t>(bw)] ^ 1);
            assert(labelend_[static_cast<std::size_t>(bw)] >= 0);
            w = endpoint_[static_cast<std::size_t>(labelend_[static_cast<std::size_t>(bw)])];
            bw = inblossom_[static_cast<std::size_t>(w)];
        }

        assert(label_[static_cast<std::size_t>(bb)] == 1);
        label_[static_cast<std::size_t>(b)] = 1;
        labelend_[static_cast<std::size_t>(b)] = labelend_[static_cast<std::size_t>(bb)];
        dualvar_[static_cast<std::size_t>(b)] = 0.0;

        for (int leaf : leaves(b)) {
            if (label_[static_cast<std::size_t>(inblossom_[static_cast<std::size_t>(leaf)])] == 2) {
                queue_.push_back(leaf);
            }
            inblossom_[static_cast<std::size_t>(leaf)] = b;
        }

        // Merge least-slack edge lists of the children.
        std::vector<int> bestedgeto(static_cast<std::size_t>(2 * nv_), -1);
        for (int child : path) {
            std::vector<std::vector<int>> nblists;
            if (!has_best_list_[static_cast<std::size_t>(child)]) {
                for (int leaf : leaves(child)) {
                    std::vector<int> ks;
                    ks.reserve(neighbend_[static_cast<std::size_t>(leaf)].size());
                    for (int p : neighbend_[static_cast<std::size_t>(leaf)]) {
                        ks.push_back(p / 2);
                    }
                    nblists.push_back(std::move(ks));
                }
            } else {
                nblists.push_back(blossombestedges_[static_cast<std::size_t>(child)]);
            }
            for (const std::vector<int>& nblist : nblists) {
                for (int kk : nblist) {
                    int i = edges_[static_cast<std::size_t>(kk)].i;
                    int j = edges_[static_cast<std::size_t>(kk)].j;
                    if (inblossom_[static_cast<std::size_t>(j)] == b) {
                        std::swap(i, j);
                    }
                    int bj = inblossom_[static_cast<std::size_t>(j)];
                    if (bj != b && label_[static_cast<std::size_t>(bj)] == 1 &&
                        (bestedgeto[static_cast<std::size_t>(bj)] == -1 ||
                         slack(kk) < slack(bestedgeto[static_cast<std::size_t>(bj)]))) {
                        bestedgeto[static_cast<std::size_t>(bj)] = kk;
                    }
                }
            }
            has_best_list_[static_cast<std::size_t>(child)] = false;
            blossombestedges_[static_cast<std::size_t>(child)].clear();
            bestedge_[static_cast<std::size_t>(child)] = -1;
        }
        std::vector<int>& blist = blossombestedges_[static_cast<std::size_t>(b)];
        blist.clear();
        for (int kk : bestedgeto) {
            if (kk != -1) {
                blist.push_back(kk);
            }
        }
        has_best_list_[static_cast<std::size_t>(b)] = true;
        bestedge_[static_cast<std::size_t>(b)] = -1;
        for (int kk : blist) {
            if (bestedge_[static_cast<std::size_t>(b)] == -1 ||
                slack(kk) < slack(bestedge_[static_cast<std::size_t>(b)])) {
                bestedge_[static_cast<std::size_t>(b)] = kk;
            }
        }
    }

    int wrapped_child(int b, long j) const {
        const std::vector<int>& c = blossomchilds_[static_cast<std::size_t>(b)];
        long m = static_cast<long>(c.size());
        long idx = ((j % m) + m) % m;
        return c[static_cast<std::size_t>(idx)];
    }

    int wrapped_endp(int b, long j) const {
        const std::vector<int>& e = blossomendps_[static_cast<std::size_t>(b)];
        long m = static_cast<long>(e.size());
        long idx = ((j % m) + m) % m;
        return e[static_cast<std::size_t>(idx)];
    }

    // Undo a blossom, either because its dual hit zero during a stage
    // (endstage false: T-blossom, children must be relabeled) or during
    // end-of-stage cleanup (endstage true).
    void expand_blossom(int b, bool endstage) {
        std::vector<int> children = blossomchilds_[static_cast<std::size_t>(b)];
        for (int s : children) {
            blossomparent_[static_cast<std::size_t>(s)] = -1;
            if (s < nv_) {
                inblossom_[static_cast<std::size_t>(s)] = s;
            } else if (endstage && dualvar_[static_cast<std::size_t>(s)] == 0.0) {
                expand_blossom(s, endstage);
            } else {
                for (int leaf : leaves(s)) {
                    inblossom_[static_cast<std::size_t>(leaf)] = s;
                }
            }
        }

        if (!endstage && label_[static_cast<std::size_t>(b)] == 2) {
            assert(labelend_[static_cast<std::size_t>(b)] >= 0);
            int entrychild = inblossom_[static_cast<std::size_t>(
                endpoint_[static_cast<std::size_t>(labelend_[static_cast<std::size_t>(b)] ^ 1)])];
            long j = static_cast<long>(
                std::find(children.begin(), children.end(), entrychild) - children.begin());
            long jstep;
            int endptrick;
            if (j & 1) {
                j -= static_cast<long>(children.size());
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            int p = labelend_[static_cast<std::size_t>(b)];
            while (j != 0) {
                label_[static_cast<std::size_t>(endpoint_[static_cast<std::size_t>(p ^ 1)])] = 0;
                label_[static_cast<std::size_t>(endpoint_[static_cast<std::size_t>(
                    wrapped_endp(b, j - endptrick) ^ endptrick ^ 1)])] = 0;
                assign_label(endpoint_[static_cast<std::size_t>(p ^ 1)], 2, p);
                allowedge_[static_cast<std::size_t>(wrapped_endp(b, j - endptrick) / 2)] = true;
                j += jstep;
                p = wrapped_endp(b, j - endptrick) ^ endptrick;
                allowedge_[static_cast<std::size_t>(p / 2)] = true;
                j += jstep;
            }
            int bv = wrapped_child(b, j);
            label_[static_cast<std::size_t>(endpoint_[static_cast<std::size_t>(p ^ 1)])] = 2;
            label_[static_cast<std::size_t>(bv)] = 2;
            labelend_[static_cast<std::size_t>(endpoint_[static_cast<std::size_t>(p ^ 1)])] = p;
            labelend_[static_cast<std::size_t>(bv)] = p;
            bestedge_[static_cast<std::size_t>(bv)] = -1;
            j += jstep;
            while (wrapped_child(b, j) != entrychild) {
                bv = wrapped_child(b, j);
                if (label_[static_cast<std::size_t>(bv)] == 1) {
                    j += jstep;
                    continue;
                }
                int labeled_leaf = -1;
                for (int leaf : leaves(bv)) {
                    if (label_[static_cast<std::size_t>(leaf)] != 0) {
                        labeled_leaf = leaf;
                        break;
                    }
                }
                if (labeled_leaf >= 0) {
                    assert(label_[static_cast<std::size_t>(labeled_leaf)] == 2);
                    assert(inblossom_[static_cast<std::size_t>(labeled_leaf)] == bv);
                    label_[static_cast<std::size_t>(labeled_leaf)] = 0;
                    label_[static_cast<std::size_t>(endpoint_[static_cast<std::size_t>(
                        mate_[static_cast<std::size_t>(blossombase_[static_cast<std::size_t>(bv)])])])] = 0;
                    assign_label(labeled_leaf, 2,
                                 labelend_[static_cast<std::size_t>(labeled_leaf)]);
                }
                j += jstep;
            }
        }

        label_[static_cast<std::size_t>(b)] = -1;
        labelend_[static_cast<std::size_t>(b)] = -1;
        blossomchilds_[static_cast<std::size_t>(b)].clear();
        blossomendps_[static_cast<std::size_t>(b)].clear();
        blossombase_[static_cast<std::size_t>(b)] = -1;
        has_best_list_[static_cast<std::size_t>(b)] = false;
        blossombestedges_[static_cast<std::size_t>(b)].clear();
        bestedge_[static_cast<std::size_t>(b)] = -1;
        unusedblossoms_.push_back(b);
    }

    // Swap matched/unmatched edges around blossom b so that its base ends
    // up at vertex v.
    void augment_blossom(int b, int v) {
        int t = v;
        while (blossomparent_[static_cast<std::size_t>(t)] != b) {
            t = blossomparent_[static_cast<std::size_t>(t)];
        }
        if (t >= nv_) {
            augment_blossom(t, v);
        }
        const std::vector<int>& children = blossomchilds_[static_cast<std::size_t>(b)];
        long i = static_cast<long>(
            std::find(children.begin(), children.end(), t) - children.begin());
        long j = i;
        long jstep;
        int endptrick;
        if (i & 1) {
            j -= static_cast<long>(children.size());
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        while (j != 0) {
            j += jstep;
            int tt = wrapped_child(b, j);
            int p = wrapped_endp(b, j - endptrick) ^ endptrick;
            if (tt >= nv_) {
                augment_blossom(tt, endpoint_[static_cast<std::size_t>(p)]);
            }
            j += jstep;
            tt = wrapped_child(b, j);
            if (tt >= nv_) {
                augment_blossom(tt, endpoint_[static_cast<std::size_t>(p ^ 1)]);
            }
            mate_[static_cast<std::size_t>(endpoint_[static_cast<std::size_t>(p)])] = p ^ 1;
            mate_[static_cast<std::size_t>(endpoint_[static_cast<std::size_t>(p ^ 1)])] = p;
        }
        std::vector<int>& childs = blossomchilds_[static_cast<std::size_t>(b)];
        std::vector<int>& endps = blossomendps_[static_cast<std::size_t>(b)];
        std::rotate(childs.begin(), childs.begin() + i, childs.end());
        std::rotate(endps.begin(), endps.begin() + i, endps.end());
        blossombase_[static_cast<std::size_t>(b)] =
            blossombase_[static_cast<std::size_t>(childs.front())];
        assert(blossombase_[static_cast<std::size_t>(b)] == v);
    }

    // Swap matched/unmatched edges along the augmenting path through edge k.
    void augment_matching(int k) {
        int v = edges_[static_cast<std::size_t>(k)].i;
        int w = edges_[static_cast<std::size_t>(k)].j;
        struct Side {
            int s;
            int p;
        };
        for (Side side : {Side{v, 2 * k + 1}, Side{w, 2 * k}}) {
            int s = side.s;
            int p = side.p;
            for (;;) {
                int bs = inblossom_[static_cast<std::size_t>(s)];
                assert(label_[static_cast<std::size_t>(bs)] == 1);
                assert(labelend_[static_cast<std::size_t>(bs)] ==
                       mate_[static_cast<std::size_t>(blossombase_[static_cast<std::size_t>(bs)])]);
                if (bs >= nv_) {
                    augment_blossom(bs, s);
                }
                mate_[static_cast<std::size_t>(s)] = p;
                if (labelend_[static_cast<std::size_t>(bs)] == -1) {
                    break;  // reached the root of this tree
                }
                int t = endpoint_[static_cast<std::size_t>(labelend_[static_cast<std::size_t>(bs)])];
                int bt = inblossom_[static_cast<std::size_t>(t)];
                assert(label_[static_cast<std::size_t>(bt)] == 2);
                assert(labelend_[static_cast<std::size_t>(bt)] >= 0);
                s = endpoint_[static_cast<std::size_t>(labelend_[static_cast<std::size_t>(bt)])];
                int j = endpoint_[static_cast<std::size_t>(labelend_[static_cast<std::size_t>(bt)] ^ 1)];
                assert(blossombase_[static_cast<std::size_t>(bt)] == t);
                if (bt >= nv_) {
                    augment_blossom(bt, j);
                }
                mate_[static_cast<std::size_t>(j)] = labelend_[static_cast<std::size_t>(bt)];
                p = labelend_[static_cast<std::size_t>(bt)] ^ 1;
            }
        }
    }

    int nv_;
    std::vector<Edge> edges_;
    int ne_;
    std::vector<int> endpoint_;
    std::vector<std::vector<int>> neighbend_;
    std::vector<int> mate_;
    std::vector<int> label_;
    std::vector<int> labelend_;
    std::vector<int> inblossom_;
    std::vector<int> blossomparent_;
    std::vector<std::vector<int>> blossomchilds_;
    std::vector<int> blossombase_;
    std::vector<std::vector<int>> blossomendps_;
    std::vector<int> bestedge_;
    std::vector<std::vector<int>> blossombestedges_;
    std::vector<char> has_best_list_;
    std::vector<int> unusedblossoms_;
    std::vector<double> dualvar_;
    std::vector<char> allowedge_;
    std::vector<int> queue_;
};

// Resolve exact total-weight ties between pair exchanges toward the
// lexicographically smallest pairing. This keeps decoder output stable when
// tau = 0 makes integer weights collide. Pairs are kept normalized: each
// (a, b) with a < b, list sorted by a.
void canonicalize_ties(std::vector<std::pair<int, int>>& pairs,
                       const std::vector<double>& weights, int n) {
    auto w = [&](int a, int b) {
        return weights[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
                       static_cast<std::size_t>(b)];
    };
    auto normalize = [](std::vector<std::pair<int, int>>& ps) {
        for (auto& pr : ps) {
            if (pr.first > pr.second) {
                std::swap(pr.first, pr.second);
            }
        }
        std::sort(ps.begin(), ps.end());
    };
    normalize(pairs);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t x = 0; x < pairs.size() && !changed; ++x) {
            for (std::size_t y = x + 1; y < pairs.size() && !changed; ++y) {
                auto [a, b] = pairs[x];
                auto [c, d] = pairs[y];
                double cur = w(a, b) + w(c, d);
                const std::pair<int, int> swaps[2][2] = {
                    {{std::min(a, c), std::max(a, c)}, {std::min(b, d), std::max(b, d)}},
                    {{std::min(a, d), std::max(a, d)}, {std::min(b, c), std::max(b, c)}},
                };
                for (const auto& alt : swaps) {
                    double alt_weight =
                        w(alt[0].first, alt[0].second) + w(alt[1].first, alt[1].second);
                    if (alt_weight == cur) {
                        std::vector<std::pair<int, int>> candidate = pairs;
                        candidate[x] = alt[0];
                        candidate[y] = alt[1];
                        normalize(candidate);
                        if (candidate < pairs) {
                            pairs = std::move(candidate);
                            changed = true;
                            break;
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

std::vector<std::pair<int, int>> min_weight_perfect_matching(
    const std::vector<double>& weights, int n) {
    if (n < 0 || n % 2 != 0) {
        throw std::invalid_argument("perfect matching needs an even node count, got " +
                                    std::to_string(n));
    }
    if (weights.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
        throw std::invalid_argument("weight matrix size does not match node count");
    }
    if (n == 0) {
        return {};
    }

    // Complement the weights so the max-cardinality maximum-weight matching
    // is the minimum-weight perfect one. Any constant works; the pair count
    // is fixed.
    double wmax = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            wmax = std::max(wmax,
                            weights[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                                    static_cast<std::size_t>(j)]);
        }
    }
    std::vector<BlossomMatcher::Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double wij = weights[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                                 static_cast<std::size_t>(j)];
            edges.push_back({i, j, wmax - wij});
        }
    }

    BlossomMatcher matcher(n, std::move(edges));
    std::vector<int> mate = matcher.solve();

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(n) / 2);
    for (int v = 0; v < n; ++v) {
        int u = mate[static_cast<std::size_t>(v)];
        if (u < 0) {
            throw std::runtime_error("matching left a node unpaired");
        }
        if (v < u) {
            pairs.emplace_back(v, u);
        }
    }
    canonicalize_ties(pairs, weights, n);
    return pairs;
}

}  // namespace toric
