//! Fixed high-contrast color table for label images. Labels index the
//! table modulo its size, so any run with the same labels produces the
//! same bytes.

pub const PALETTE: [[u8; 3]; 32] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 212],
    [0, 128, 128],
    [220, 190, 255],
    [170, 110, 40],
    [255, 250, 200],
    [128, 0, 0],
    [170, 255, 195],
    [128, 128, 0],
    [255, 215, 180],
    [0, 0, 128],
    [128, 128, 128],
    [255, 255, 255],
    [0, 0, 0],
    [233, 150, 122],
    [46, 139, 87],
    [72, 61, 139],
    [255, 105, 180],
    [95, 158, 160],
    [189, 183, 107],
    [139, 69, 19],
    [176, 196, 222],
    [47, 79, 79],
    [154, 205, 50],
];

pub fn color_of(label: u32) -> [u8; 3] {
    PALETTE[label as usize % PALETTE.len()]
}

/// Expand per-pixel labels into an RGB raster.
pub fn render_labels(labels: &[u32]) -> Vec<u8> {
    let mut rgb = Vec::with_capacity(labels.len() * 3);
    for &label in labels {
        rgb.extend_from_slice(&color_of(label));
    }
    rgb
}
