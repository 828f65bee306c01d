//! Annotated spectrogram previews: grayscale image with label boxes burned in.

use image::{GrayImage, Rgb, RgbImage};
use stftsweep_core::annotate::Annotation;

const PALETTE: [[u8; 3]; 8] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
];

pub fn class_color(class_id: u32) -> Rgb<u8> {
    Rgb(PALETTE[class_id as usize % PALETTE.len()])
}

/// Outlines every annotation `thickness` pixels wide on a color copy of `img`.
pub fn draw_boxes(img: &GrayImage, labels: &[Annotation], thickness: u32) -> RgbImage {
    let (w, h) = img.dimensions();
    let mut out = RgbImage::from_fn(w, h, |x, y| {
        let v = img.get_pixel(x, y)[0];
        Rgb([v, v, v])
    });
    if w == 0 || h == 0 {
        return out;
    }
    for a in labels {
        let (x0, y0, x1, y1) = a.bbox.corners();
        let px = |v: f64, n: u32| ((v * n as f64).round().max(0.0) as u32).min(n - 1);
        let (x0, x1) = (px(x0, w), px(x1, w));
        let (y0, y1) = (px(y0, h), px(y1, h));
        let color = class_color(a.class_id);
        for t in 0..thickness {
            for x in x0..=x1 {
                out.put_pixel(x, (y0 + t).min(y1), color);
                out.put_pixel(x, y1.saturating_sub(t).max(y0), color);
            }
            for y in y0..=y1 {
                out.put_pixel((x0 + t).min(x1), y, color);
                out.put_pixel(x1.saturating_sub(t).max(x0), y, color);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use stftsweep_core::annotate::BoxCxCyWh;

    #[test]
    fn outline_only() {
        let img = GrayImage::new(100, 100);
        let a = Annotation {
            class_id: 1,
            bbox: BoxCxCyWh::new(0.5, 0.5, 0.4, 0.2),
        };
        let out = draw_boxes(&img, &[a], 1);
        assert_eq!(*out.get_pixel(30, 40), class_color(1));
        assert_eq!(*out.get_pixel(70, 60), class_color(1));
        assert_eq!(*out.get_pixel(50, 50), Rgb([0, 0, 0]));
        assert_eq!(*out.get_pixel(10, 10), Rgb([0, 0, 0]));
    }
}
