# Event file generation for tppflow tests