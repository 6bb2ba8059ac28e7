// Reference edge map from OpenCV, used to produce committed goldens.
//
//   canny_reference in.pgm out.pgm [low high]
//
// Thresholds are on the library's step-normalized scale: OpenCV's Sobel
// magnitude of a blurred step of height h is gain·h, so they are
// multiplied by the same gain before calling cv::Canny.

#include <fstream>
#include <iostream>
#include <string>

#include <opencv2/imgproc.hpp>

#include "glyphdraw/image.hpp"

int main(int argc, char** argv) {
    if (argc != 3 && argc != 5) {
        std::cerr << "usage: canny_reference in.pgm out.pgm [low high]\n";
        return 1;
    }
    const double low = argc == 5 ? std::stod(argv[3]) : 50.0;
    const double high = argc == 5 ? std::stod(argv[4]) : 150.0;
    std::ifstream is(argv[1], std::ios::binary);
    if (!is) {
        std::cerr << "cannot open " << argv[1] << '\n';
        return 1;
    }
    glyphdraw::GlyphImage img = glyphdraw::read_pgm(is);

    const cv::Mat k = cv::getGaussianKernel(5, 1.4, CV_64F);
    const double gain = 4.0 * (k.at<double>(2) + k.at<double>(1));

    cv::Mat src(static_cast<int>(img.height()), static_cast<int>(img.width()), CV_8U, img.pixels().data());
    cv::Mat blurred, edges;
    cv::GaussianBlur(src, blurred, cv::Size(5, 5), 1.4, 1.4, cv::BORDER_REPLICATE);
    cv::Canny(blurred, edges, low * gain, high * gain, 3, true);

    glyphdraw::GlyphImage out(img.width(), img.height());
    for (std::size_t y = 0; y < img.height(); ++y)
        for (std::size_t x = 0; x < img.width(); ++x)
            out.at(x, y) = edges.at<unsigned char>(static_cast<int>(y), static_cast<int>(x)) ? 255 : 0;
    std::ofstream os(argv[2], std::ios::binary);
    glyphdraw::write_pgm(os, out);
    return os ? 0 : 1;
}
