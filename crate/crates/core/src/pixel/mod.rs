//! Pixel-level primitives: images, gradient, watershed, erosion and file I/O.

mod erosion;
mod gradient;
mod image;
mod io;
mod labels;
mod watershed;

pub use self::erosion::{erode, eroded_area, StructuringElement};
pub use self::gradient::morphological_gradient;
pub use self::image::{BinaryMask, Image, ScalarField};
pub use self::io::{import_labels, load_image, save_image, save_labels};
pub use self::labels::LabelMap;
pub use self::watershed::{regional_minima, watershed_fine_partition};

pub(crate) use self::image::check_same_dims;
pub(crate) use self::io::save_gray16;
