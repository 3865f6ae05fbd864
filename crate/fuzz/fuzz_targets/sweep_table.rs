#![no_main]

use lackwalk_core::harness::{read_table, write_table, TableFormat};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_table(data) {
        let mut buf = Vec::new();
        write_table(&rows, TableFormat::Csv, &mut buf).unwrap();
        assert_eq!(read_table(buf.as_slice()).unwrap(), rows);
    }
});
