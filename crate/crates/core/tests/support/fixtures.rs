use adavln_core::episode::HumanConfig;
use adavln_core::geometry::{Aabb, Point2, PolygonObstacle, Pose2};
use adavln_core::{Episode, Scene};

/// Small walled room with three obstacles and two humans whose loops cross
/// the robot's start area.
pub fn cluttered() -> (Scene, Episode) {
    let obstacles = vec![
        PolygonObstacle::rectangle(Point2::new(1.0, -0.6), Point2::new(1.4, 0.6)).unwrap(),
        PolygonObstacle::new(vec![Point2::new(-1.5, 1.0), Point2::new(-0.5, 1.2), Point2::new(-1.0, 2.0)]).unwrap(),
        PolygonObstacle::rectangle(Point2::new(-2.0, -2.0), Point2::new(-1.2, -1.1)).unwrap(),
    ];
    let scene = Scene::new("clutter", Aabb::new(Point2::new(-3.0, -3.0), Point2::new(3.0, 3.0)), obstacles).unwrap();
    let humans = vec![
        HumanConfig {
            id: "a".into(),
            spawn: Pose2::from_degrees(0.6, 1.5, 0.0),
            waypoints: vec![Point2::new(0.6, -2.0)],
            speed: 0.8,
            footprint_radius: 0.3,
        },
        HumanConfig {
            id: "b".into(),
            spawn: Pose2::from_degrees(-2.4, 0.0, 0.0),
            waypoints: vec![Point2::new(0.5, 0.0), Point2::new(0.5, 2.4)],
            speed: 1.2,
            footprint_radius: 0.25,
        },
    ];
    let ep = Episode {
        id: "c".into(),
        scene_id: "clutter".into(),
        instruction: "wander".into(),
        start: Pose2::from_degrees(0.3, -0.2, 0.0),
        goal: Point2::new(2.5, 2.5),
        success_radius: 1.0,
        max_steps: 50,
        humans,
        reference_path: None,
    };
    (scene, ep)
}

