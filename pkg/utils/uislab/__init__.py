# Uncertain-inference comparison lab
