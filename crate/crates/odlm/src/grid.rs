use crate::params::ModelError;

/// A grayscale image: row-major 8-bit pixels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PixelGrid {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl PixelGrid {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self, ModelError> {
        if width == 0 || height == 0 || data.is_empty() {
            return Err(ModelError::EmptyImage);
        }
        assert_eq!(data.len(), width as usize * height as usize, "pixel count mismatch");
        Ok(PixelGrid { width, height, data })
    }

    /// Uniform image filled with one gray level.
    pub fn filled(width: u32, height: u32, value: u8) -> Result<Self, ModelError> {
        PixelGrid::new(width, height, vec![value; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn pixel(&self, x: u32, y: u32) -> u8 {
        self.data[(y * self.width + x) as usize]
    }

    pub fn pixels(&self) -> &[u8] {
        &self.data
    }
}
