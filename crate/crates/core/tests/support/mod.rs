#![allow(dead_code)]

pub mod fixtures;
pub mod grid;
pub mod logs;
pub mod scenes;
