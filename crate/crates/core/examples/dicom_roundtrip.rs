//! Write a CT slice as DICOM in both transfer syntaxes and read it back.

use slice2stl::dicom::{parse_dicom_with_meta, write_dicom, DicomEncoding, TransferSyntax};
use slice2stl::phantom::{PhantomSpec, Shape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let slice = PhantomSpec::new(Shape::Cylinder { radius: 100.0 }, 1).render_slice(0)?;
    for syntax in [TransferSyntax::ExplicitVrLittleEndian, TransferSyntax::ImplicitVrLittleEndian] {
        let enc = DicomEncoding { syntax, ..DicomEncoding::default() };
        let bytes = write_dicom(&slice, &enc)?;
        let (meta, back) = parse_dicom_with_meta(&bytes)?;
        println!(
            "{}: {} bytes, {}x{} {}-bit, slope {} intercept {}, thickness {} mm, identical={}",
            syntax.uid(),
            bytes.len(),
            meta.columns,
            meta.rows,
            meta.bits_stored,
            meta.rescale_slope,
            meta.rescale_intercept,
            meta.slice_thickness_mm,
            back.pixels() == slice.pixels()
        );
    }
    Ok(())
}
