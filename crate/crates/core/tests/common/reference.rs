//! Reference accuracy and macro-F1 rows with their expected composite scores.

/// (block, model, six accuracies in CLAS column order, expected CLAS).
pub const CLAS_ROWS: &[(&str, &str, [f64; 6], f64)] = &[
    ("last", "mBERT", [54.75, 42.90, 74.87, 33.80, 26.30, 39.05], 14.20),
    ("last", "mBERT Trilingual", [69.43, 63.49, 71.52, 73.23, 54.49, 49.69], 50.97),
    ("last", "Hing-mBERT", [52.78, 71.86, 32.30, 33.43, 24.70, 28.99], 17.01),
    ("last", "Hing-mBERT Trilingual", [57.73, 62.96, 78.05, 76.40, 53.00, 59.70], 51.07),
    ("last", "Hing-mBERT-Mixed", [54.26, 74.63, 41.81, 60.73, 49.51, 48.94], 34.95),
    ("last", "Hing-mBERT-Mixed Trilingual", [54.64, 62.42, 71.52, 70.06, 41.96, 49.15], 42.51),
    ("last", "XLM-R", [50.56, 50.67, 58.81, 54.33, 38.37, 40.46], 39.53),
    ("last", "XLM-R Trilingual", [56.06, 54.18, 53.43, 54.50, 48.37, 46.93], 47.50),
    ("last", "Hing-RoBERTa", [64.94, 72.14, 15.02, 27.54, 26.19, 14.48], 3.74),
    ("last", "Hing-RoBERTa Trilingual", [81.43, 89.85, 69.11, 76.70, 63.84, 62.58], 58.98),
    ("last", "Hing-RoBERTa-Mixed", [86.95, 92.37, 83.20, 84.98, 72.88, 77.78], 73.09),
    ("last", "Hing-RoBERTa-Mixed Trilingual", [86.40, 93.31, 84.65, 84.08, 73.27, 80.96], 73.50),
    ("mean", "mBERT", [58.77, 57.51, 59.35, 60.15, 45.10, 42.73], 45.35),
    ("mean", "mBERT Trilingual", [65.15, 63.47, 71.05, 70.55, 48.26, 49.20], 50.98),
    ("mean", "Hing-mBERT", [65.76, 68.57, 44.43, 49.58, 50.64, 46.15], 40.84),
    ("mean", "Hing-mBERT Trilingual", [64.87, 65.90, 58.17, 60.18, 60.86, 59.98], 57.67),
    ("mean", "Hing-mBERT-Mixed", [60.57, 62.31, 48.89, 50.63, 56.25, 55.72], 49.62),
    ("mean", "Hing-mBERT-Mixed Trilingual", [66.78, 67.82, 56.11, 60.56, 58.01, 55.44], 53.45),
    ("mean", "XLM-R", [67.77, 68.34, 68.61, 68.24, 66.24, 67.04], 66.36),
    ("mean", "XLM-R Trilingual", [72.26, 72.16, 71.96, 72.11, 71.07, 70.84], 71.02),
    ("mean", "Hing-RoBERTa", [69.40, 68.93, 54.33, 56.81, 55.75, 52.45], 50.75),
    ("mean", "Hing-RoBERTa Trilingual", [71.62, 73.85, 67.55, 69.61, 64.36, 64.21], 63.60),
    ("mean", "Hing-RoBERTa-Mixed", [72.05, 70.72, 64.73, 66.92, 65.41, 63.02], 62.10),
    ("mean", "Hing-RoBERTa-Mixed Trilingual", [70.41, 68.01, 65.57, 65.87, 65.68, 62.90], 62.51),
];

/// (task, training language, model, macro-F1 on CM/EN/HI, expected consistency).
pub const CONSISTENCY_ROWS: &[(&str, &str, &str, [f64; 3], f64)] = &[
    ("sentiment", "CM", "mBERT", [0.5192, 0.5672, 0.3095], 0.3283),
    ("sentiment", "CM", "mBERT Trilingual", [0.6290, 0.6420, 0.4281], 0.4464),
    ("sentiment", "CM", "mBERT w/o alignment", [0.6537, 0.6177, 0.3538], 0.3780),
    ("sentiment", "EN", "mBERT", [0.4196, 0.7323, 0.4604], 0.3674),
    ("sentiment", "EN", "mBERT Trilingual", [0.5333, 0.7277, 0.5103], 0.4710),
    ("sentiment", "EN", "mBERT w/o alignment", [0.5286, 0.7163, 0.5201], 0.4774),
    ("sentiment", "HI", "mBERT", [0.4962, 0.6271, 0.6577], 0.5079),
    ("sentiment", "HI", "mBERT Trilingual", [0.5460, 0.6325, 0.6768], 0.5519),
    ("sentiment", "HI", "mBERT w/o alignment", [0.5575, 0.5868, 0.6730], 0.5457),
    ("sentiment", "CM", "XLM-R", [0.6571, 0.6301, 0.6445], 0.6304),
    ("sentiment", "CM", "XLM-R Trilingual", [0.6892, 0.6905, 0.6591], 0.6618),
    ("sentiment", "CM", "XLM-R w/o alignment", [0.6839, 0.6936, 0.6456], 0.6490),
    ("sentiment", "EN", "XLM-R", [0.4589, 0.7381, 0.6315], 0.4686),
    ("sentiment", "EN", "XLM-R Trilingual", [0.4970, 0.7316, 0.6312], 0.5022),
    ("sentiment", "EN", "XLM-R w/o alignment", [0.4898, 0.7275, 0.5946], 0.4848),
    ("sentiment", "HI", "XLM-R", [0.6102, 0.7240, 0.6935], 0.6170),
    ("sentiment", "HI", "XLM-R Trilingual", [0.6249, 0.7276, 0.7044], 0.6318),
    ("sentiment", "HI", "XLM-R w/o alignment", [0.6323, 0.7169, 0.6934], 0.6372),
    ("sentiment-hing", "CM", "Hing-mBERT", [0.6916, 0.7141, 0.3221], 0.3558),
    ("sentiment-hing", "CM", "Hing-mBERT Trilingual", [0.6722, 0.6895, 0.3784], 0.4052),
    ("sentiment-hing", "CM", "Hing-mBERT Mixed", [0.7241, 0.7122, 0.6812], 0.6837),
    ("sentiment-hing", "CM", "Hing-mBERT Mixed Trilingual", [0.7139, 0.7110, 0.6900], 0.6919),
    ("sentiment-hing", "EN", "Hing-mBERT", [0.5613, 0.7311, 0.2748], 0.2918),
    ("sentiment-hing", "EN", "Hing-mBERT Trilingual", [0.5572, 0.7260, 0.4607], 0.4470),
    ("sentiment-hing", "EN", "Hing-mBERT Mixed", [0.5524, 0.7498, 0.6104], 0.5361),
    ("sentiment-hing", "EN", "Hing-mBERT Mixed Trilingual", [0.5268, 0.7304, 0.6725], 0.5383),
    ("sentiment-hing", "HI", "Hing-mBERT", [0.4749, 0.4386, 0.6720], 0.4029),
    ("sentiment-hing", "HI", "Hing-mBERT Trilingual", [0.6137, 0.6462, 0.6415], 0.6162),
    ("sentiment-hing", "HI", "Hing-mBERT Mixed", [0.6878, 0.7322, 0.7062], 0.6864),
    ("sentiment-hing", "HI", "Hing-mBERT Mixed Trilingual", [0.6886, 0.7200, 0.7044], 0.6886),
    ("sentiment-hing", "CM", "Hing-RoBERTa", [0.7074, 0.7127, 0.2982], 0.3350),
    ("sentiment-hing", "CM", "Hing-RoBERTa Trilingual", [0.7049, 0.6889, 0.6204], 0.6265),
    ("sentiment-hing", "CM", "Hing-RoBERTa Mixed", [0.7063, 0.7288, 0.7075], 0.7015),
    ("sentiment-hing", "CM", "Hing-RoBERTa Mixed Trilingual", [0.7304, 0.7122, 0.6975], 0.6969),
    ("sentiment-hing", "EN", "Hing-RoBERTa", [0.5425, 0.7351, 0.2519], 0.2666),
    ("sentiment-hing", "EN", "Hing-RoBERTa Trilingual", [0.5535, 0.7742, 0.6163], 0.5343),
    ("sentiment-hing", "EN", "Hing-RoBERTa Mixed", [0.6200, 0.7703, 0.6750], 0.6124),
    ("sentiment-hing", "EN", "Hing-RoBERTa Mixed Trilingual", [0.6678, 0.7349, 0.6899], 0.6633),
    ("sentiment-hing", "HI", "Hing-RoBERTa", [0.6681, 0.7361, 0.7150], 0.6716),
    ("sentiment-hing", "HI", "Hing-RoBERTa Trilingual", [0.6899, 0.7252, 0.7092], 0.6904),
    ("sentiment-hing", "HI", "Hing-RoBERTa Mixed", [0.6907, 0.7377, 0.7036], 0.6864),
    ("sentiment-hing", "HI", "Hing-RoBERTa Mixed Trilingual", [0.7057, 0.7466, 0.7243], 0.7051),
    ("hate", "CM", "mBERT", [0.6706, 0.6194, 0.5373], 0.5542),
    ("hate", "CM", "mBERT Trilingual", [0.6631, 0.6188, 0.6427], 0.6194),
    ("hate", "CM", "mBERT w/o alignment", [0.6847, 0.6575, 0.5937], 0.6072),
    ("hate", "EN", "mBERT", [0.5777, 0.6294, 0.4732], 0.4805),
    ("hate", "EN", "mBERT Trilingual", [0.6391, 0.6362, 0.6094], 0.6119),
    ("hate", "EN", "mBERT w/o alignment", [0.6850, 0.6779, 0.5692], 0.5791),
    ("hate", "HI", "mBERT", [0.5879, 0.5361, 0.6653], 0.5314),
    ("hate", "HI", "mBERT Trilingual", [0.5520, 0.6105, 0.6529], 0.5545),
    ("hate", "HI", "mBERT w/o alignment", [0.5287, 0.6308, 0.6402], 0.5381),
    ("hate", "CM", "XLM-R", [0.6794, 0.6856, 0.6071], 0.6217),
    ("hate", "CM", "XLM-R Trilingual", [0.6972, 0.6803, 0.6863], 0.6794),
    ("hate", "CM", "XLM-R w/o alignment", [0.6720, 0.6540, 0.4738], 0.5104),
    ("hate", "EN", "XLM-R", [0.6698, 0.6889, 0.6226], 0.6326),
    ("hate", "EN", "XLM-R Trilingual", [0.6816, 0.7003, 0.6759], 0.6732),
    ("hate", "EN", "XLM-R w/o alignment", [0.6736, 0.6967, 0.6394], 0.6464),
    ("hate", "HI", "XLM-R", [0.6315, 0.6632, 0.6850], 0.6379),
    ("hate", "HI", "XLM-R Trilingual", [0.6628, 0.6635, 0.6856], 0.6577),
    ("hate", "HI", "XLM-R w/o alignment", [0.6403, 0.6894, 0.6972], 0.6504),
    ("hate-hing", "CM", "Hing-mBERT", [0.6981, 0.6748, 0.3890], 0.4468),
    ("hate-hing", "CM", "Hing-mBERT Trilingual", [0.6556, 0.6212, 0.5136], 0.5363),
    ("hate-hing", "CM", "Hing-mBERT Mixed", [0.6961, 0.6660, 0.6109], 0.6224),
    ("hate-hing", "CM", "Hing-mBERT Mixed Trilingual", [0.6915, 0.6692, 0.6475], 0.6514),
    ("hate-hing", "EN", "Hing-mBERT", [0.6970, 0.6883, 0.3890], 0.4482),
    ("hate-hing", "EN", "Hing-mBERT Trilingual", [0.6722, 0.6569, 0.4189], 0.4667),
    ("hate-hing", "EN", "Hing-mBERT Mixed", [0.6980, 0.7060, 0.5836], 0.6066),
    ("hate-hing", "EN", "Hing-mBERT Mixed Trilingual", [0.7098, 0.6847, 0.5845], 0.6055),
    ("hate-hing", "HI", "Hing-mBERT", [0.5268, 0.4189, 0.6361], 0.4386),
    ("hate-hing", "HI", "Hing-mBERT Trilingual", [0.6414, 0.6236, 0.6534], 0.6272),
    ("hate-hing", "HI", "Hing-mBERT Mixed", [0.5830, 0.5450, 0.6948], 0.5440),
    ("hate-hing", "HI", "Hing-mBERT Mixed Trilingual", [0.6729, 0.6779, 0.6984], 0.6720),
    ("hate-hing", "CM", "Hing-RoBERTa", [0.7263, 0.7093, 0.3890], 0.4530),
    ("hate-hing", "CM", "Hing-RoBERTa Trilingual", [0.6872, 0.6727, 0.6609], 0.6628),
    ("hate-hing", "CM", "Hing-RoBERTa Mixed", [0.6971, 0.6841, 0.6271], 0.6390),
    ("hate-hing", "CM", "Hing-RoBERTa Mixed Trilingual", [0.7223, 0.6814, 0.6717], 0.6699),
    ("hate-hing", "EN", "Hing-RoBERTa", [0.7259, 0.7294, 0.3890], 0.4551),
    ("hate-hing", "EN", "Hing-RoBERTa Trilingual", [0.7036, 0.6955, 0.6929], 0.6928),
    ("hate-hing", "EN", "Hing-RoBERTa Mixed", [0.7191, 0.7275, 0.6645], 0.6758),
    ("hate-hing", "EN", "Hing-RoBERTa Mixed Trilingual", [0.6778, 0.6885, 0.6759], 0.6752),
    ("hate-hing", "HI", "Hing-RoBERTa", [0.4950, 0.4047, 0.6710], 0.4130),
    ("hate-hing", "HI", "Hing-RoBERTa Trilingual", [0.6318, 0.6640, 0.6493], 0.6352),
    ("hate-hing", "HI", "Hing-RoBERTa Mixed", [0.6303, 0.6273, 0.7196], 0.6162),
    ("hate-hing", "HI", "Hing-RoBERTa Mixed Trilingual", [0.6862, 0.6683, 0.6973], 0.6720),
];
