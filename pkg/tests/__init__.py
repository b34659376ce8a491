# Test package for twitter-parse-html-analysis
