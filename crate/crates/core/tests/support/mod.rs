pub mod trs_oracle;
