#include "turtleid/pipeline.hpp"

#include "turtleid/image_io.hpp"
#include "turtleid/keypoint.hpp"
#include "turtleid/parallel.hpp"

namespace turtleid {

GrayImage preprocess_roi(const RgbImage& img, double rotation_deg, const RoiRect& roi,
                         const PipelineConfig& cfg) {
    GrayImage gray = to_grayscale(img);
    GrayImage rotated = rotate(gray, rotation_deg);
    GrayImage cropped = crop_roi(rotated, roi);
    GrayImage smoothed = gaussian_smooth(cropped, gaussian_kernel(cfg.smooth_size, cfg.smooth_sigma));
    return resize(smoothed, cfg.hog.window_w, cfg.hog.window_h);
}

PreprocessedDataset load_and_preprocess(const std::filesystem::path& manifest,
                                        const PipelineConfig& cfg, int jobs) {
    PreprocessedDataset ds;
    ds.records = load_manifest(manifest);
    int n = static_cast<int>(ds.records.size());
    ds.keys.resize(static_cast<std::size_t>(n));
    ds.rois.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        ds.keys[static_cast<std::size_t>(i)] = {make_sample_id(i, ds.records[static_cast<std::size_t>(i)]),
                                                ds.records[static_cast<std::size_t>(i)].individual_id};
    parallel_for(n, jobs, [&](int i) {
        const SampleRecord& rec = ds.records[static_cast<std::size_t>(i)];
        RgbImage img = load_image(resolve_image_path(manifest, rec.image_path));
        ds.rois[static_cast<std::size_t>(i)] = preprocess_roi(img, rec.rotation_deg, rec.roi, cfg);
    });
    return ds;
}

DistanceMatrix build_distance_matrix(const std::vector<GrayImage>& rois,
                                     std::vector<SampleKey> keys, const PipelineConfig& cfg,
                                     int jobs) {
    int n = static_cast<int>(rois.size());
    DistanceMatrix dm;
    dm.keys = std::move(keys);
    dm.d.assign(static_cast<std::size_t>(n) * n, 0.0);

    if (cfg.kind == DescriptorKind::Hog) {
        std::vector<HogDescriptor> descs(static_cast<std::size_t>(n));
        parallel_for(n, jobs, [&](int i) {
            descs[static_cast<std::size_t>(i)] = compute_hog(rois[static_cast<std::size_t>(i)], cfg.hog);
        });
        parallel_for(n, jobs, [&](int q) {
            for (int g = q + 1; g < n; ++g) {
                double d = hog_distance(descs[static_cast<std::size_t>(q)],
                                        descs[static_cast<std::size_t>(g)]);
                dm.at(q, g) = d;
                dm.at(g, q) = d;
            }
        });
        return dm;
    }

    // keypoint baseline: detect and describe once per image, then bridge
    // match counts into distances (asymmetric)
    Kernel k = gaussian_kernel(4, 1.0);
    std::vector<std::vector<BinaryDescriptor>> descs(static_cast<std::size_t>(n));
    std::vector<GrayImage> smoothed(static_cast<std::size_t>(n));
    parallel_for(n, jobs, [&](int i) {
        smoothed[static_cast<std::size_t>(i)] = gaussian_smooth(rois[static_cast<std::size_t>(i)], k);
        auto kps = detect_fast(smoothed[static_cast<std::size_t>(i)], cfg.fast_threshold,
                               cfg.max_keypoints);
        auto& d = descs[static_cast<std::size_t>(i)];
        d.reserve(kps.size());
        for (const auto& kp : kps) d.push_back(describe_brief(smoothed[static_cast<std::size_t>(i)], kp));
    });
    parallel_for(n, jobs, [&](int q) {
        for (int g = 0; g < n; ++g) {
            if (g == q) continue;
            int count = 0;
            if (!descs[static_cast<std::size_t>(q)].empty() &&
                descs[static_cast<std::size_t>(g)].size() >= 2)
                count = match_keypoints(descs[static_cast<std::size_t>(q)],
                                        descs[static_cast<std::size_t>(g)],
                                        cfg.acceptance_threshold)
                            .positive_match_count;
            dm.at(q, g) = 1.0 / (1.0 + count);
        }
    });
    return dm;
}

}  // namespace turtleid
